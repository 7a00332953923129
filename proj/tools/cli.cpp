// Copyright 2026 The qcurv Authors
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

#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "qcurv/curvature.hpp"
#include "qcurv/cvmodels.hpp"
#include "qcurv/gibbs.hpp"
#include "qcurv/metrics.hpp"
#include "qcurv/pauli.hpp"
#include "qcurv/random.hpp"

namespace qcurv::cli {

using nlohmann::json;

namespace {

// ---- schema helpers ------------------------------------------------------

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, size_t i) { return ptr + "/" + std::to_string(i); }

const json& need(const json& j, const std::string& key, const std::string& ptr) {
  if (!j.is_object()) throw SpecError(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SpecError(child(ptr, key), "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw SpecError(ptr, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw SpecError(ptr, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw SpecError(ptr, "expected a string");
  return j.get<std::string>();
}

double number_or(const json& j, const std::string& key, double def, const std::string& ptr) {
  return j.contains(key) ? as_number(j.at(key), child(ptr, key)) : def;
}

int int_or(const json& j, const std::string& key, int def, const std::string& ptr) {
  return j.contains(key) ? as_int(j.at(key), child(ptr, key)) : def;
}

cplx as_entry(const json& j, const std::string& ptr) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SpecError(ptr, "expected a number or a [re, im] pair");
}

CMat as_matrix(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SpecError(ptr, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  CMat m;
  for (size_t r = 0; r < j.size(); ++r) {
    const auto& row = j[r];
    const std::string rp = child(ptr, r);
    if (!row.is_array()) throw SpecError(rp, "expected a row array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m = CMat::Zero(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw SpecError(rp, "rows have different lengths");
    }
    for (size_t c = 0; c < row.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = as_entry(row[c], child(rp, c));
  }
  return m;
}

// ---- output helpers ------------------------------------------------------

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return json{{"status", "undefined"}};
  return json{{"status", "infinite"}};
}

std::string base64(const std::vector<unsigned char>& bytes) {
  static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    for (int s = 18; s >= 0; s -= 6) out += tbl[(v >> s) & 63];
  }
  const size_t rest = bytes.size() - i;
  if (rest) {
    unsigned v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += rest == 2 ? tbl[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

// Column-major (re, im) doubles, little-endian.
json matrix_blob(const CMat& m) {
  std::vector<unsigned char> bytes;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (double part : {m(r, c).real(), m(r, c).imag()}) {
        std::uint64_t bits;
        std::memcpy(&bits, &part, sizeof bits);
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xff));
      }
  return base64(bytes);
}

json transport_json(const TransportResult& t) {
  if (t.infinite) return json{{"status", "infinite"}};
  return json{{"status", "finite"}, {"value", t.value}, {"upper", num(t.upper)}, {"gap", num(t.gap)}};
}

// ---- models --------------------------------------------------------------

struct Model {
  std::string kind;
  Channel channel;
  CMat reference;  // invariant reference state
  std::optional<PauliChannelSpec> pauli;
  std::optional<BoseChannel> bose;
  std::optional<LocalHamiltonian> hamiltonian;
  std::optional<GeneratorSpec> generator;
  std::vector<ConditionalExpectation> replacements;
  std::vector<int> site_dims;
  double beta = 0.0;
  double lambda = 1.0;
  int modes = 0;
  std::optional<FermiReport> fermi;
};

PauliChannelSpec parse_pauli(const json& j, const std::string& ptr) {
  PauliChannelSpec s;
  s.n = as_int(need(j, "n", ptr), child(ptr, "n"));
  const json& terms = need(j, "terms", ptr);
  const std::string tp = child(ptr, "terms");
  if (!terms.is_array()) throw SpecError(tp, "expected an array");
  for (size_t i = 0; i < terms.size(); ++i) {
    const std::string ip = child(tp, i);
    const std::string str = as_string(need(terms[i], "string", ip), child(ip, "string"));
    if (static_cast<int>(str.size()) != s.n) throw SpecError(child(ip, "string"), "string length differs from n");
    PauliString p;
    try {
      p = PauliString::parse(str);
    } catch (const std::exception& e) {
      throw SpecError(child(ip, "string"), e.what());
    }
    s.terms.push_back({p, as_number(need(terms[i], "weight", ip), child(ip, "weight"))});
  }
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw SpecError(tp, e.what());
  }
  return s;
}

PauliChannelSpec depolarizing_spec(int n, double p) {
  PauliChannelSpec s;
  s.n = n;
  const std::uint64_t total = 1ULL << (2 * n);
  for (std::uint64_t g = 0; g < total; ++g)
    s.terms.push_back({PauliString::from_index(n, g), g == 0 ? 1.0 - p : p / static_cast<double>(total - 1)});
  s.validate();
  return s;
}

CMat parse_env(const json& j, const std::string& ptr, int N) {
  const std::string kind = as_string(need(j, "kind", ptr), child(ptr, "kind"));
  if (kind == "thermal") {
    const double beta = as_number(need(j, "beta", ptr), child(ptr, "beta"));
    if (beta <= 0) throw SpecError(child(ptr, "beta"), "beta must be positive");
    return thermal_state(beta, N).rho;
  }
  if (kind == "vacuum") {
    CMat v = CMat::Zero(N + 1, N + 1);
    v(0, 0) = 1.0;
    return v;
  }
  if (kind == "matrix") return as_matrix(need(j, "data", ptr), child(ptr, "data"));
  throw SpecError(child(ptr, "kind"), "unknown environment kind '" + kind + "'");
}

Model build_model(const json& spec) {
  const std::string ptr = "/channel";
  const json& j = need(spec, "channel", "");
  Model m;
  m.kind = as_string(need(j, "kind", ptr), child(ptr, "kind"));
  if (m.kind == "pauli" || m.kind == "depolarizing") {
    if (m.kind == "pauli") {
      m.pauli = parse_pauli(j, ptr);
    } else {
      const int n = int_or(j, "n", 1, ptr);
      const double p = as_number(need(j, "p", ptr), child(ptr, "p"));
      if (n < 1 || n > 4) throw SpecError(child(ptr, "n"), "n must lie in 1..4");
      if (p < 0 || p > 1) throw SpecError(child(ptr, "p"), "p must lie in [0, 1]");
      m.pauli = depolarizing_spec(n, p);
    }
    m.channel = pauli_channel(*m.pauli);
    const int d = 1 << m.pauli->n;
    m.reference = CMat::Identity(d, d) / static_cast<double>(d);
  } else if (m.kind == "kraus") {
    const json& ks = need(j, "kraus", ptr);
    const std::string kp = child(ptr, "kraus");
    if (!ks.is_array() || ks.empty()) throw SpecError(kp, "expected a non-empty array of matrices");
    std::vector<CMat> kraus;
    for (size_t i = 0; i < ks.size(); ++i) kraus.push_back(as_matrix(ks[i], child(kp, i)));
    try {
      m.channel = channel_from_kraus(kraus);
    } catch (const std::exception& e) {
      throw SpecError(kp, e.what());
    }
    if (j.contains("dim") && as_int(j.at("dim"), child(ptr, "dim")) != m.channel.dim)
      throw SpecError(child(ptr, "dim"), "dimension differs from the Kraus operators");
    m.reference = CMat::Identity(m.channel.dim, m.channel.dim) / static_cast<double>(m.channel.dim);
  } else if (m.kind == "gibbs") {
    const std::string model = as_string(need(j, "model", ptr), child(ptr, "model"));
    if (model != "ising_chain") throw SpecError(child(ptr, "model"), "only ising_chain is supported");
    const int n = as_int(need(j, "n", ptr), child(ptr, "n"));
    if (n < 1 || n > 6) throw SpecError(child(ptr, "n"), "n must lie in 1..6");
    m.beta = as_number(need(j, "beta", ptr), child(ptr, "beta"));
    m.hamiltonian = ising_chain(n, number_or(j, "coupling", 1.0, ptr), number_or(j, "field", 0.0, ptr));
    try {
      m.generator = heat_bath_generator(*m.hamiltonian, m.beta);
    } catch (const std::exception& e) {
      throw SpecError(ptr, e.what());
    }
    m.channel = semigroup_channel(*m.generator, number_or(j, "time", 1.0, ptr));
    m.reference = gibbs_state(m.hamiltonian->dense(), m.beta);
    m.site_dims = m.hamiltonian->dims();
  } else if (m.kind == "site_replacements") {
    const json& dj = need(j, "dims", ptr);
    if (!dj.is_array() || dj.empty()) throw SpecError(child(ptr, "dims"), "expected a non-empty array");
    for (size_t i = 0; i < dj.size(); ++i) m.site_dims.push_back(as_int(dj[i], child(child(ptr, "dims"), i)));
    CMat avg;
    for (int s = 0; s < static_cast<int>(m.site_dims.size()); ++s) {
      m.replacements.push_back(site_replacement(m.site_dims, s));
      const CMat& S = m.replacements.back().map.superop;
      avg = s == 0 ? CMat(S) : CMat(avg + S);
    }
    avg /= static_cast<double>(m.site_dims.size());
    m.channel = channel_from_superop(avg);
    m.reference = CMat::Identity(m.channel.dim, m.channel.dim) / static_cast<double>(m.channel.dim);
  } else if (m.kind == "bose_beam_splitter") {
    BeamSplitterSpec b;
    b.lambda = as_number(need(j, "lambda", ptr), child(ptr, "lambda"));
    b.cutoff = int_or(j, "cutoff", 20, ptr);
    if (b.cutoff < 2 || b.cutoff > 40) throw SpecError(child(ptr, "cutoff"), "cutoff must lie in 2..40");
    if (b.lambda < 0 || b.lambda > 1) throw SpecError(child(ptr, "lambda"), "lambda must lie in [0, 1]");
    b.env = j.contains("env") ? parse_env(j.at("env"), child(ptr, "env"), b.cutoff) : thermal_state(1.0, b.cutoff).rho;
    try {
      m.bose = bose_channel(b);
    } catch (const std::exception& e) {
      throw SpecError(child(ptr, "env"), e.what());
    }
    m.channel = m.bose->channel;
    m.lambda = b.lambda;
    m.reference = b.env;
  } else if (m.kind == "fermi_beam_splitter") {
    m.modes = as_int(need(j, "n", ptr), child(ptr, "n"));
    if (m.modes < 1 || m.modes > 3) throw SpecError(child(ptr, "n"), "n must lie in 1..3");
    m.lambda = as_number(need(j, "lambda", ptr), child(ptr, "lambda"));
    if (m.lambda < 0 || m.lambda > 1) throw SpecError(child(ptr, "lambda"), "lambda must lie in [0, 1]");
    const int d = 1 << m.modes;
    const CMat env = j.contains("env") ? as_matrix(j.at("env"), child(ptr, "env")) : CMat(CMat::Identity(d, d) / d);
    try {
      auto [ch, rep] = fermi_beam_splitter(m.lambda, m.modes, env);
      m.channel = std::move(ch);
      m.fermi = rep;
    } catch (const std::exception& e) {
      throw SpecError(child(ptr, "env"), e.what());
    }
    m.reference = CMat::Identity(d, d) / static_cast<double>(d);
  } else {
    throw SpecError(child(ptr, "kind"), "unknown channel kind '" + m.kind + "'");
  }
  return m;
}

CMat parse_generator(const json& j, const std::string& ptr, int dim) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    PauliString p;
    try {
      p = PauliString::parse(s);
    } catch (const std::exception& e) {
      throw SpecError(ptr, e.what());
    }
    if ((1 << p.n) != dim) throw SpecError(ptr, "Pauli string does not match the channel dimension");
    return p.matrix();
  }
  CMat m = as_matrix(j, ptr);
  if (m.rows() != dim || m.cols() != dim) throw SpecError(ptr, "generator does not match the channel dimension");
  return m;
}

SemiNormSpec build_seminorm(const json& spec, const Model& m) {
  const json* sj = nullptr;
  std::string ptr;
  if (spec.contains("seminorm")) {
    sj = &spec.at("seminorm");
    ptr = "/seminorm";
  } else if (spec.contains("metric") && spec.at("metric").contains("seminorm")) {
    sj = &spec.at("metric").at("seminorm");
    ptr = "/metric/seminorm";
  }
  std::string variant;
  if (sj) {
    variant = as_string(need(*sj, "variant", ptr), child(ptr, "variant"));
  } else if (m.pauli) {
    variant = "pauli";
  } else if (m.bose) {
    variant = "bose";
  } else if (m.fermi) {
    variant = "fermi";
  } else if (!m.site_dims.empty()) {
    variant = "oscillator";
  } else {
    variant = "operator_norm";
  }
  const int d = m.channel.dim;
  if (variant == "operator_norm") return SemiNormSpec::operator_norm(d);
  if (variant == "pauli") {
    if (!m.pauli) throw SpecError(ptr.empty() ? "/seminorm" : child(ptr, "variant"), "requires a Pauli channel");
    return pauli_seminorm(*m.pauli);
  }
  if (variant == "bose") {
    if (!m.bose) throw SpecError(ptr.empty() ? "/seminorm" : child(ptr, "variant"), "requires a bosonic channel");
    return bose_seminorm(m.bose->spec.cutoff);
  }
  if (variant == "fermi") {
    if (!m.fermi) throw SpecError(ptr.empty() ? "/seminorm" : child(ptr, "variant"), "requires a fermionic channel");
    return fermi_seminorm(m.modes);
  }
  if (variant == "commutator_max" || variant == "commutator_l2") {
    const json& g = need(*sj, "generators", ptr);
    const std::string gp = child(ptr, "generators");
    if (!g.is_array() || g.empty()) throw SpecError(gp, "expected a non-empty array");
    std::vector<CMat> gens;
    for (size_t i = 0; i < g.size(); ++i) gens.push_back(parse_generator(g[i], child(gp, i), d));
    return variant == "commutator_max" ? SemiNormSpec::commutator_max(gens) : SemiNormSpec::commutator_l2(gens);
  }
  if (variant == "oscillator" || variant == "ornstein") {
    std::vector<int> dims = m.site_dims;
    if (sj && sj->contains("site_dims")) {
      dims.clear();
      const json& dj = sj->at("site_dims");
      for (size_t i = 0; i < dj.size(); ++i) dims.push_back(as_int(dj[i], child(child(ptr, "site_dims"), i)));
    }
    int prod = 1;
    for (int x : dims) prod *= x;
    if (dims.empty() || prod != d) throw SpecError(ptr.empty() ? "/seminorm" : ptr, "site_dims do not match the channel");
    return variant == "oscillator" ? SemiNormSpec::oscillator(dims) : SemiNormSpec::ornstein(dims);
  }
  throw SpecError(child(ptr, "variant"), "unknown semi-norm variant '" + variant + "'");
}

CMat parse_state(const json& j, const std::string& ptr, int dim, Rng& rng) {
  if (j.is_array()) {
    CMat r = as_matrix(j, ptr);
    if (r.rows() != dim || !is_state(r, 1e-8)) throw SpecError(ptr, "not a density matrix of the channel dimension");
    return hermitize(r);
  }
  const std::string kind = as_string(need(j, "kind", ptr), child(ptr, "kind"));
  if (kind == "maximally_mixed") return CMat::Identity(dim, dim) / static_cast<double>(dim);
  if (kind == "basis") {
    const int k = as_int(need(j, "index", ptr), child(ptr, "index"));
    if (k < 0 || k >= dim) throw SpecError(child(ptr, "index"), "index outside the dimension");
    CMat r = CMat::Zero(dim, dim);
    r(k, k) = 1.0;
    return r;
  }
  if (kind == "random") return random_state(rng, dim);
  if (kind == "pure") {
    const json& v = need(j, "vector", ptr);
    if (!v.is_array() || static_cast<int>(v.size()) != dim) throw SpecError(child(ptr, "vector"), "length differs from the dimension");
    CVec psi(dim);
    for (int i = 0; i < dim; ++i) psi(i) = as_entry(v[static_cast<size_t>(i)], child(child(ptr, "vector"), static_cast<size_t>(i)));
    if (psi.norm() == 0) throw SpecError(child(ptr, "vector"), "zero vector");
    psi.normalize();
    return psi * psi.adjoint();
  }
  if (kind == "thermal") {
    const double beta = as_number(need(j, "beta", ptr), child(ptr, "beta"));
    if (beta <= 0) throw SpecError(child(ptr, "beta"), "beta must be positive");
    return thermal_state(beta, dim - 1).rho;
  }
  throw SpecError(child(ptr, "kind"), "unknown state kind '" + kind + "'");
}

CMat state_or(const json& spec, const std::string& key, int dim, Rng& rng, const CMat& fallback) {
  return spec.contains(key) ? parse_state(spec.at(key), "/" + key, dim, rng) : fallback;
}

std::vector<CMat> sample_states(const json& spec, int dim, Rng& rng, int def) {
  std::vector<CMat> out;
  if (spec.contains("states") && spec.at("states").is_array()) {
    const json& s = spec.at("states");
    for (size_t i = 0; i < s.size(); ++i) out.push_back(parse_state(s[i], child("/states", i), dim, rng));
    return out;
  }
  const int n = spec.contains("samples") ? as_int(spec.at("samples"), "/samples") : def;
  for (int i = 0; i < n; ++i) out.push_back(random_state(rng, dim));
  return out;
}

// ---- tasks ---------------------------------------------------------------

json curvature_json(const CurvatureReport& r) {
  json res = json::object();
  for (const auto& [k, v] : r.residuals) res[k] = num(v);
  json out{{"kind", "curvature"},       {"factor_upper", num(r.upper_bound_factor)},
           {"factor_lower", num(r.lower_bound_factor)}, {"kappa", num(1.0 - r.upper_bound_factor)},
           {"certified", r.certified}, {"method", r.method},
           {"residuals", res}};
  if (r.witness.size()) {
    out["witness"] = matrix_blob(r.witness);
    out["witness_shape"] = {r.witness.rows(), r.witness.cols()};
  }
  return out;
}

TaskResult task_curvature(const json& spec, const Model& m, const TaskOptions& opt, Rng& rng) {
  TaskResult t;
  if (m.hamiltonian) {
    std::vector<double> grid{0.1, 0.5, 1.0, 2.0, 5.0};
    const GibbsCertificate c =
        gibbs_contraction_certificate(*m.hamiltonian, m.beta, grid, int_or(spec, "samples", 20, ""), rng);
    json ld = json::array();
    for (double x : c.local_diamond) ld.push_back(num(x));
    t.report = {{"kind", "gibbs_certificate"}, {"kappa_beta", num(c.kappa_beta)}, {"applicable", c.applicable},
                {"local_diamond", ld}, {"worst_ratio", num(c.worst_ratio)}, {"max_violation", num(c.max_violation)},
                {"empirical_rate", num(c.empirical_rate)}};
    t.certified = !c.applicable || c.max_violation <= opt.tol;
    return t;
  }
  const SemiNormSpec L = build_seminorm(spec, m);
  LipschitzOptions lo;
  lo.seed = static_cast<std::uint64_t>(rng.integer(0, 1 << 30));
  lo.restarts = int_or(spec, "restarts", m.channel.dim <= 8 ? 20 : 0, "");
  CurvatureReport r;
  if (m.pauli && !spec.contains("seminorm")) {
    r = pauli_lipschitz_factor(*m.pauli);
  } else {
    if (m.bose) lo.structural_bound = std::sqrt(m.lambda);
    if (m.fermi) lo.structural_bound = m.fermi->structural_factor;
    r = lipschitz_factor(m.channel, L, lo);
    if (m.bose) r.residuals["intertwining"] = bose_intertwining_residual(*m.bose, m.bose->spec.cutoff / 2);
    if (m.fermi) {
      r.residuals["intertwining"] = m.fermi->intertwining_residual;
      r.residuals["intertwining_even"] = m.fermi->intertwining_residual_even;
    }
  }
  t.report = curvature_json(r);
  t.certified = std::isinf(r.upper_bound_factor) || r.lower_bound_factor <= r.upper_bound_factor + std::max(opt.tol, 1e-7);
  return t;
}

TaskResult task_wasserstein(const json& spec, const Model& m, const TaskOptions&, Rng& rng) {
  TaskResult t;
  const int d = m.channel.dim;
  const CMat rho1 = parse_state(need(spec, "rho1", ""), "/rho1", d, rng);
  const CMat rho2 = parse_state(need(spec, "rho2", ""), "/rho2", d, rng);
  std::string metric = "w1";
  if (spec.contains("metric")) metric = as_string(need(spec.at("metric"), "metric", "/metric"), "/metric/metric");
  if (metric == "coupling") {
    CMat cost;
    const json& c = need(spec.at("metric"), "cost", "/metric");
    if (c.is_string()) {
      if (c.get<std::string>() != "singlet_projector") throw SpecError("/metric/cost", "unknown named cost");
      cost = singlet_projector();
    } else {
      cost = as_matrix(c, "/metric/cost");
    }
    if (cost.rows() != d * d) throw SpecError("/metric/cost", "cost must act on the doubled space");
    t.report = transport_json(coupling_cost(cost, rho1, rho2));
  } else if (metric == "w1") {
    if ((rho1 - rho2).cwiseAbs().maxCoeff() == 0.0) {
      t.report = {{"status", "finite"}, {"value", 0}, {"upper", 0}, {"gap", 0}};
    } else {
      t.report = transport_json(w1_dual(build_seminorm(spec, m), rho1, rho2));
    }
  } else {
    throw SpecError("/metric/metric", "unknown metric '" + metric + "'");
  }
  t.report["kind"] = "wasserstein";
  t.report["metric"] = metric;
  return t;
}

TaskResult task_gap(const json&, const Model& m, const TaskOptions&, Rng&) {
  TaskResult t;
  t.report["kind"] = "gap";
  if (m.generator) {
    t.report["generator_gap"] = num(generator_gap(m.generator->superop, m.reference));
  }
  const ConditionalExpectation E = fixed_point_expectation(m.channel, m.reference);
  t.report["gap"] = num(spectral_gap(m.channel, m.reference, E));
  if (m.pauli) t.report["structural_kappa"] = num(1.0 - pauli_structural_factor(*m.pauli));
  return t;
}

TaskResult task_tc(const json& spec, const Model& m, const TaskOptions& opt, Rng& rng) {
  if (m.replacements.empty()) throw SpecError("/channel/kind", "certify-tc needs site_replacements");
  TaskResult t;
  const SemiNormSpec L = build_seminorm(spec, m);
  const double kappa = number_or(spec, "kappa", 0.5, "");
  const double C = number_or(spec, "C", 1.0, "");
  LipschitzOptions lo;
  lo.seed = static_cast<std::uint64_t>(rng.integer(0, 1 << 30));
  lo.restarts = int_or(spec, "restarts", 10, "");
  const CurvatureReport f = lipschitz_factor(m.channel, L, lo);
  json rows = json::array();
  double worst = std::numeric_limits<double>::infinity();
  bool premise = true;
  for (const CMat& rho : sample_states(spec, m.channel.dim, rng, 10)) {
    const InequalityReport r = tc_inequality_check(m.replacements, L, kappa, C, rho, f.lower_bound_factor);
    rows.push_back({{"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"slack", num(r.slack)}, {"premise_ok", r.premise_ok}});
    if (!r.vacuous) worst = std::min(worst, r.slack);
    premise = premise && r.premise_ok;
  }
  t.report = {{"kind", "certify-tc"}, {"kappa", kappa}, {"C", C}, {"measured_factor", num(f.lower_bound_factor)},
              {"premise_ok", premise}, {"min_slack", num(worst)}, {"rows", rows}};
  t.certified = premise && !(worst < -opt.tol);
  return t;
}

TaskResult task_ti(const json& spec, const Model& m, const TaskOptions& opt, Rng& rng) {
  if (!m.pauli) throw SpecError("/channel/kind", "certify-ti needs a Pauli or depolarizing channel");
  TaskResult t;
  const int d = m.channel.dim;
  DerivationStructure ds;
  for (const auto& term : m.pauli->terms) {
    if (term.string.is_identity() || term.weight <= 0) continue;
    ds.v.push_back(std::sqrt(term.weight / 2) * term.string.matrix());
    ds.omega.push_back(0.0);
  }
  if (ds.v.empty()) throw SpecError("/channel/terms", "the semigroup is trivial");
  ds.sigma = m.reference;
  const GeneratorSpec gen = generator_from_superop(ds.lindbladian());
  const double kappa = number_or(spec, "kappa", 1.0, "");
  double C = number_or(spec, "C", -1.0, "");
  if (C < 0) C = std::max(1.0, semigroup_decay_constant(ds, gen, kappa, {0.1, 0.5, 1.0, 2.0}, rng, 10));
  json rows = json::array();
  double worst = std::numeric_limits<double>::infinity();
  double ident = 0.0;
  for (const CMat& rho : sample_states(spec, d, rng, 10)) {
    const InequalityReport r = ti_inequality_check(ds, gen, C, kappa, rho);
    ident = std::max(ident, std::abs(r.details.at("dirichlet_energy") - r.details.at("generator_energy")));
    rows.push_back({{"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"slack", num(r.slack)}});
    if (!r.vacuous) worst = std::min(worst, r.slack);
  }
  t.report = {{"kind", "certify-ti"}, {"kappa", kappa}, {"C", C}, {"min_slack", num(worst)},
              {"dirichlet_identity_residual", ident}, {"rows", rows}};
  t.certified = !(worst < -opt.tol);
  return t;
}

TaskResult task_mixing(const json& spec, const Model& m, const TaskOptions& opt, Rng& rng) {
  TaskResult t;
  const int d = m.channel.dim;
  std::ostringstream csv;
  csv.precision(17);
  json rows = json::array();
  bool ok = true;
  if (m.pauli) {
    const CMat rho = state_or(spec, "rho", d, rng, random_state(rng, d));
    csv << "step,measured,bound\n";
    for (const auto& r : pauli_mixing_check(*m.pauli, rho, opt.steps)) {
      csv << r.step << ',' << r.measured << ',' << r.bound << '\n';
      rows.push_back({{"step", r.step}, {"measured", num(r.measured)}, {"bound", num(r.bound)}});
      ok = ok && r.measured <= r.bound + opt.tol;
    }
  } else if (m.bose) {
    CMat one = CMat::Zero(d, d);
    one(1, 1) = 1.0;
    const CMat rho = state_or(spec, "rho", d, rng, one);
    csv << "step,measured,bound,bound_closed_form\n";
    for (const auto& r : bose_mixing_corollary(*m.bose, rho, opt.steps)) {
      csv << r.step << ',' << r.measured << ',' << r.bound_jump << ',' << r.bound_closed << '\n';
      rows.push_back({{"step", r.step}, {"measured", num(r.measured)}, {"bound", num(r.bound_jump)},
                      {"bound_closed_form", num(r.bound_closed)}});
      ok = ok && r.measured <= r.bound_jump + opt.tol && r.measured <= r.bound_closed + opt.tol;
    }
  } else {
    throw SpecError("/channel/kind", "mixing needs a Pauli or bosonic channel");
  }
  t.report = {{"kind", "mixing"}, {"rows", rows}};
  t.csv = csv.str();
  t.certified = ok;
  return t;
}

TaskResult task_intertwine(const json& spec, const Model& m, const TaskOptions& opt, Rng& rng) {
  TaskResult t;
  t.report["kind"] = "intertwine";
  if (m.bose) {
    const int N = m.bose->spec.cutoff;
    const int sector = int_or(spec, "sector", N / 2, "");
    const double res = bose_intertwining_residual(*m.bose, sector);
    auto states = ge_sample_states(rng, sector + 1, int_or(spec, "samples", 16, ""));
    double leak = 0.0;
    for (auto& s : states) {
      s = embed_fock_state(s, N);
      leak = std::max(leak, bose_leakage(*m.bose, s));
    }
    GEOptions go;
    go.observable_subspace = fock_sector_basis(N, sector);
    const GEReport ge = verify_ge(m.channel, bose_derivations(N), states, go);
    t.report["residual"] = num(res);
    t.report["kappa_star"] = num(ge.kappa_star);
    t.report["leakage"] = num(leak);
    t.report["sector"] = sector;
    t.certified = res <= std::max(opt.tol, 1e-8);
  } else if (m.fermi) {
    t.report["residual"] = num(m.fermi->intertwining_residual);
    t.report["residual_even"] = num(m.fermi->intertwining_residual_even);
    t.report["relation_residual"] = num(m.fermi->relation_residual);
    t.report["car_residual"] = num(m.fermi->car_residual);
    t.certified = m.fermi->intertwining_residual <= std::max(opt.tol, 1e-8);
  } else {
    throw SpecError("/channel/kind", "intertwine needs a bosonic or fermionic beam splitter");
  }
  return t;
}

std::string flat_csv(const json& report) {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [k, v] : report.items())
    if (v.is_primitive()) out << k << ',' << v.dump() << '\n';
  return out.str();
}

}  // namespace

TaskResult run_task(const std::string& command, const json& spec, const TaskOptions& opt) {
  if (!spec.is_object()) throw SpecError("", "spec must be a JSON object");
  Rng rng(opt.seed);
  const Model m = build_model(spec);
  TaskResult t;
  if (command == "curvature") t = task_curvature(spec, m, opt, rng);
  else if (command == "wasserstein") t = task_wasserstein(spec, m, opt, rng);
  else if (command == "gap") t = task_gap(spec, m, opt, rng);
  else if (command == "certify-tc") t = task_tc(spec, m, opt, rng);
  else if (command == "certify-ti") t = task_ti(spec, m, opt, rng);
  else if (command == "mixing") t = task_mixing(spec, m, opt, rng);
  else if (command == "intertwine") t = task_intertwine(spec, m, opt, rng);
  else throw std::invalid_argument("unknown command " + command);
  t.report["version"] = kVersion;
  t.report["command"] = command;
  t.report["seed"] = opt.seed;
  t.report["tol"] = opt.tol;
  t.report["channel"] = m.kind;
  t.report["certified_run"] = t.certified;
  return t;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"qcurv: coarse Ricci curvature certificates for quantum channels"};
  app.set_version_flag("--version", kVersion);
  std::string command, spec_path, out_path, format = "json";
  TaskOptions opt;
  app.add_option("command", command, "curvature | wasserstein | gap | certify-tc | certify-ti | mixing | intertwine")
      ->required()
      ->check(CLI::IsMember({"curvature", "wasserstein", "gap", "certify-tc", "certify-ti", "mixing", "intertwine"}));
  app.add_option("--spec", spec_path, "experiment description (JSON)")->required();
  app.add_option("--out", out_path, "report path (default: stdout)");
  app.add_option("--tol", opt.tol, "certificate tolerance")->capture_default_str();
  app.add_option("--seed", opt.seed, "seed of the single random generator")->capture_default_str();
  app.add_option("--steps", opt.steps, "steps for mixing tables")->capture_default_str();
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  json spec;
  {
    std::ifstream in(spec_path);
    if (!in) {
      std::cerr << "error: cannot read " << spec_path << "\n";
      return 1;
    }
    try {
      spec = json::parse(in);
    } catch (const json::parse_error& e) {
      std::cerr << "error: " << spec_path << " is not valid JSON: " << e.what() << "\n";
      return 1;
    }
  }
  TaskResult t;
  try {
    t = run_task(command, spec, opt);
  } catch (const SpecError& e) {
    std::cerr << "spec error at " << (e.pointer.empty() ? "/" : e.pointer) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const std::string text = format == "csv" ? (t.csv.empty() ? flat_csv(t.report) : t.csv) : t.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    out << text;
  }
  return t.certified ? 0 : 2;
}

}  // namespace qcurv::cli
