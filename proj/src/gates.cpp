// Copyright 2026 The hhlsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hhlsim/gates.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hhlsim/qsim.hpp"

namespace hhlsim {

const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::H: return "H";
    case GateKind::CZ: return "CZ";
    case GateKind::SQRT_ISWAP: return "SQRT_ISWAP";
    case GateKind::ISWAP: return "ISWAP";
    case GateKind::VIRTUAL_Z: return "VIRTUAL_Z";
  }
  return "?";
}

GateKind gate_kind_from_name(const std::string& name) {
  if (name == "RX") return GateKind::RX;
  if (name == "RY") return GateKind::RY;
  if (name == "RZ") return GateKind::RZ;
  if (name == "H") return GateKind::H;
  if (name == "CZ") return GateKind::CZ;
  if (name == "SQRT_ISWAP") return GateKind::SQRT_ISWAP;
  if (name == "ISWAP") return GateKind::ISWAP;
  if (name == "VIRTUAL_Z") return GateKind::VIRTUAL_Z;
  throw std::invalid_argument("unknown gate kind: " + name);
}

bool gate_is_rotation(GateKind k) {
  return k == GateKind::RX || k == GateKind::RY || k == GateKind::RZ ||
         k == GateKind::VIRTUAL_Z;
}

int gate_arity(GateKind k) {
  return (k == GateKind::CZ || k == GateKind::SQRT_ISWAP || k == GateKind::ISWAP) ? 2 : 1;
}

GateSpec::GateSpec(GateKind k, std::vector<std::string> t, double ang, double dur)
    : kind(k), angle(ang), targets(std::move(t)), duration_ns(dur) {
  validate();
}

void GateSpec::validate() const {
  if (static_cast<int>(targets.size()) != gate_arity(kind))
    throw std::invalid_argument(std::string("gate ") + gate_kind_name(kind) +
                                ": wrong target count");
  if (gate_is_rotation(kind) && !std::isfinite(angle))
    throw std::invalid_argument("gate angle must be finite");
  if (duration_ns < 0) throw std::invalid_argument("gate duration must be >= 0");
}

void Circuit::append(const Circuit& other) {
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

int Circuit::physical_gate_count() const {
  int n = 0;
  for (const auto& g : gates)
    if (g.kind != GateKind::VIRTUAL_Z) ++n;
  return n;
}

Matrix rotation_matrix(char axis, double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("rotation angle must be finite");
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  const Complex i(0, 1);
  Matrix m(2, 2);
  switch (axis) {
    case 'X': m << c, -i * s, -i * s, c; break;
    case 'Y': m << c, -s, s, c; break;
    case 'Z': m << std::exp(-i * (angle / 2)), 0, 0, std::exp(i * (angle / 2)); break;
    default: throw std::invalid_argument("rotation axis must be X, Y or Z");
  }
  return m;
}

Matrix hadamard_matrix() {
  Matrix m(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return m;
}

Matrix virtual_z_matrix(double phi) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1;
  m(1, 1) = std::exp(Complex(0, phi));
  return m;
}

Matrix two_qubit_matrix(GateKind kind) {
  Matrix m = Matrix::Identity(4, 4);
  const Complex mi(0, -1);
  const double r = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case GateKind::CZ:
      m(3, 3) = -1;
      break;
    case GateKind::SQRT_ISWAP:
      m(1, 1) = r; m(2, 2) = r;
      m(1, 2) = mi * r; m(2, 1) = mi * r;
      break;
    case GateKind::ISWAP:
      m(1, 1) = 0; m(2, 2) = 0;
      m(1, 2) = mi; m(2, 1) = mi;
      break;
    default:
      throw std::invalid_argument("two_qubit_matrix: not a two-qubit kind");
  }
  return m;
}

Matrix gate_matrix(const GateSpec& g) {
  switch (g.kind) {
    case GateKind::RX: return rotation_matrix('X', g.angle);
    case GateKind::RY: return rotation_matrix('Y', g.angle);
    case GateKind::RZ: return rotation_matrix('Z', g.angle);
    case GateKind::H: return hadamard_matrix();
    case GateKind::VIRTUAL_Z: return virtual_z_matrix(g.angle);
    default: return two_qubit_matrix(g.kind);
  }
}

namespace {

void require_neighbors(const SubsystemLayout& layout, const std::string& a,
                       const std::string& b, const char* what) {
  if (!layout.neighbors(layout.site_index(a), layout.site_index(b)))
    throw std::invalid_argument(std::string(what) + ": " + a + " and " + b +
                                " are not nearest neighbors on the chain");
}

}  // namespace

Circuit controlled_iswap_combo(const std::string& control, const std::string& a,
                               const std::string& b, const SubsystemLayout& layout) {
  require_neighbors(layout, control, a, "controlled_iswap_combo");
  require_neighbors(layout, a, b, "controlled_iswap_combo");
  Circuit c;
  c.gates.emplace_back(GateKind::SQRT_ISWAP, std::vector<std::string>{a, b});
  c.gates.emplace_back(GateKind::CZ, std::vector<std::string>{control, a});
  c.gates.emplace_back(GateKind::SQRT_ISWAP, std::vector<std::string>{a, b});
  return c;
}

Circuit controlled_ry_decomposition(double theta, const std::string& control,
                                    const std::string& target,
                                    const SubsystemLayout& layout) {
  require_neighbors(layout, control, target, "controlled_ry_decomposition");
  // CRy(t) = [Ry(t/2)] CX [Ry(-t/2)] CX with CX = H.CZ.H on the target.
  Circuit c;
  auto t1 = std::vector<std::string>{target};
  auto t2 = std::vector<std::string>{control, target};
  c.gates.emplace_back(GateKind::H, t1);
  c.gates.emplace_back(GateKind::CZ, t2);
  c.gates.emplace_back(GateKind::H, t1);
  c.gates.emplace_back(GateKind::RY, t1, -theta / 2);
  c.gates.emplace_back(GateKind::H, t1);
  c.gates.emplace_back(GateKind::CZ, t2);
  c.gates.emplace_back(GateKind::H, t1);
  c.gates.emplace_back(GateKind::RY, t1, theta / 2);
  return c;
}

Matrix lift_gate(const Matrix& u, const std::vector<int>& dims) {
  int dfull = 1;
  for (int d : dims) dfull *= d;
  const int n = static_cast<int>(dims.size());
  if (u.rows() == dfull) return u;
  // Map a full index to its 2^n computational index, or -1 on any level-2.
  auto comp_index = [&](int idx) {
    int rem = idx, ci = 0;
    for (int k = n - 1; k >= 0; --k) {
      const int lv = rem % dims[k];
      rem /= dims[k];
      if (lv > 1) return -1;
      ci |= lv << (n - 1 - k);
    }
    return ci;
  };
  Matrix out = Matrix::Identity(dfull, dfull);
  for (int i = 0; i < dfull; ++i) {
    const int ci = comp_index(i);
    if (ci < 0) continue;
    for (int j = 0; j < dfull; ++j) {
      const int cj = comp_index(j);
      if (cj < 0) { out(i, j) = 0; continue; }
      out(i, j) = u(ci, cj);
    }
  }
  return out;
}

Matrix circuit_unitary(const Circuit& circuit, const SubsystemLayout& layout) {
  if (circuit.postselection)
    throw SimulationError("circuit_unitary: circuit carries a postselection marker");
  const int dim = layout.dim();
  Matrix u = Matrix::Identity(dim, dim);
  for (const auto& g : circuit.gates) {
    std::vector<int> targets;
    std::vector<int> tdims;
    for (const auto& t : g.targets) {
      targets.push_back(layout.site_index(t));
      tdims.push_back(layout.dims[targets.back()]);
    }
    Matrix gm = lift_gate(gate_matrix(g), tdims);
    for (int col = 0; col < dim; ++col) {
      PureState s(u.col(col), layout);
      u.col(col) = apply_unitary(s, gm, targets).amplitudes;
    }
  }
  return u;
}

Circuit inverse_circuit(const Circuit& circuit) {
  Circuit inv;
  inv.roles = circuit.roles;
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
    const GateSpec& g = *it;
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
        inv.gates.emplace_back(g.kind, g.targets, -g.angle, g.duration_ns);
        break;
      case GateKind::VIRTUAL_Z:
        inv.gates.emplace_back(g.kind, g.targets, -g.angle, 0.0);
        break;
      case GateKind::H:
      case GateKind::CZ:
        inv.gates.push_back(g);
        break;
      case GateKind::SQRT_ISWAP:
      case GateKind::ISWAP: {
        // U^dag = (Z x I) U (Z x I) for excitation-exchange gates.
        std::vector<std::string> first{g.targets[0]};
        inv.gates.emplace_back(GateKind::VIRTUAL_Z, first, M_PI, 0.0);
        inv.gates.push_back(g);
        inv.gates.emplace_back(GateKind::VIRTUAL_Z, first, M_PI, 0.0);
        break;
      }
    }
  }
  return inv;
}

std::string circuit_to_text(const Circuit& circuit) {
  std::ostringstream os;
  char buf[64];
  auto fmt = [&buf](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  for (const auto& g : circuit.gates) {
    os << gate_kind_name(g.kind);
    if (gate_is_rotation(g.kind)) os << ' ' << fmt(g.angle);
    for (const auto& t : g.targets) os << ' ' << t;
    os << ' ' << fmt(g.duration_ns) << '\n';
  }
  if (circuit.postselection)
    os << "POSTSELECT " << circuit.postselection->first << ' '
       << circuit.postselection->second << '\n';
  for (const auto& [role, labels] : circuit.roles) os << "ROLE " << role << ' ' << labels << '\n';
  return os.str();
}

Circuit circuit_from_text(const std::string& text) {
  Circuit c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;
    try {
      if (head == "POSTSELECT") {
        std::string label;
        int outcome;
        if (!(ls >> label >> outcome)) throw std::invalid_argument("bad POSTSELECT line");
        if (c.postselection) throw std::invalid_argument("multiple POSTSELECT markers");
        c.postselection = {label, outcome};
        continue;
      }
      if (head == "ROLE") {
        std::string role, labels;
        if (!(ls >> role >> labels)) throw std::invalid_argument("bad ROLE line");
        c.roles[role] = labels;
        continue;
      }
      GateSpec g;
      g.kind = gate_kind_from_name(head);
      if (gate_is_rotation(g.kind)) {
        if (!(ls >> g.angle)) throw std::invalid_argument("missing angle");
      }
      for (int k = 0; k < gate_arity(g.kind); ++k) {
        std::string t;
        if (!(ls >> t)) throw std::invalid_argument("missing target");
        g.targets.push_back(t);
      }
      if (!(ls >> g.duration_ns)) throw std::invalid_argument("missing duration");
      g.validate();
      c.gates.push_back(std::move(g));
    } catch (const std::exception& e) {
      throw ConfigError("circuit text line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

}  // namespace hhlsim
