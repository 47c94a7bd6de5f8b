#pragma once

// Model files, analysis reports and the analyze / evolve / batch pipelines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gqms/classical.hpp"
#include "gqms/dynamics.hpp"
#include "gqms/invariant.hpp"
#include "gqms/model.hpp"
#include "gqms/spectral.hpp"
#include "gqms/symplectic.hpp"

namespace gqms::io {

using json = nlohmann::ordered_json;

/// Schema or shape violation in a model file; the message names the field.
class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFile {
  std::string name;
  std::string description;
  std::optional<GkslSpec> gksl;
  DriftDiffusion dd;
};

namespace detail {

inline double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw ModelFormatError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ModelFormatError(where + ": non-finite value");
  return x;
}

inline Complex complex_at(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw ModelFormatError(where + ": expected a [re, im] pair");
  return {number_at(v[0], where + "[0]"), number_at(v[1], where + "[1]")};
}

inline const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ModelFormatError(where + "." + key + ": missing field");
  return obj.at(key);
}

inline Matrix real_matrix(const json& v, const std::string& where) {
  if (!v.is_array()) throw ModelFormatError(where + ": expected an array of rows");
  const Index rows = static_cast<Index>(v.size());
  Index cols = -1;
  Matrix m;
  for (Index r = 0; r < rows; ++r) {
    const json& row = v[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array()) throw ModelFormatError(rw + ": expected a row array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw ModelFormatError(rw + ": row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = number_at(row[c], rw + "[" + std::to_string(c) + "]");
  }
  if (cols < 0) return Matrix(0, 0);
  return m;
}

inline Vector real_vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw ModelFormatError(where + ": expected an array");
  Vector out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out(i) = number_at(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

inline CMatrix complex_matrix(const json& v, const std::string& where, Index expected_cols) {
  if (!v.is_array()) throw ModelFormatError(where + ": expected an array of rows");
  CMatrix m(static_cast<Index>(v.size()), expected_cols);
  for (size_t r = 0; r < v.size(); ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || static_cast<Index>(v[r].size()) != expected_cols)
      throw ModelFormatError(rw + ": expected a row of " + std::to_string(expected_cols) + " [re, im] pairs");
    for (Index c = 0; c < expected_cols; ++c) m(r, c) = complex_at(v[r][c], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline CVector complex_vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw ModelFormatError(where + ": expected an array of [re, im] pairs");
  CVector out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out(i) = complex_at(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

}  // namespace detail

inline ModelFile parse_model(const json& root, double tol = kDefaultTol) {
  if (!root.is_object()) throw ModelFormatError("model: top level must be an object");
  ModelFile mf;
  if (root.contains("metadata")) {
    const json& md = root.at("metadata");
    if (!md.is_object()) throw ModelFormatError("metadata: expected an object");
    if (md.contains("name")) {
      if (!md.at("name").is_string()) throw ModelFormatError("metadata.name: expected a string");
      mf.name = md.at("name").get<std::string>();
    }
    if (md.contains("description")) {
      if (!md.at("description").is_string()) throw ModelFormatError("metadata.description: expected a string");
      mf.description = md.at("description").get<std::string>();
    }
  }
  const bool has_g = root.contains("gksl");
  const bool has_p = root.contains("phase_space");
  if (has_g == has_p) throw ModelFormatError("model: exactly one of 'gksl' or 'phase_space' must be present");
  try {
    if (has_g) {
      const json& g = root.at("gksl");
      if (!g.is_object()) throw ModelFormatError("gksl: expected an object");
      const json& om = detail::field(g, "Omega", "gksl");
      if (!om.is_array() || om.empty()) throw ModelFormatError("gksl.Omega: expected a non-empty d x d array");
      const Index d = static_cast<Index>(om.size());
      GkslSpec s;
      s.Omega = detail::complex_matrix(om, "gksl.Omega", d);
      s.kappa = detail::complex_matrix(detail::field(g, "kappa", "gksl"), "gksl.kappa", d);
      if (s.kappa.rows() != d) throw ModelFormatError("gksl.kappa: expected " + std::to_string(d) + " rows");
      s.zeta = detail::complex_vector(detail::field(g, "zeta", "gksl"), "gksl.zeta");
      if (s.zeta.size() != d) throw ModelFormatError("gksl.zeta: expected length " + std::to_string(d));
      s.U = detail::complex_matrix(detail::field(g, "U", "gksl"), "gksl.U", d);
      s.V = detail::complex_matrix(detail::field(g, "V", "gksl"), "gksl.V", d);
      if (s.U.rows() != s.V.rows()) throw ModelFormatError("gksl.U/gksl.V: row counts differ");
      if (s.U.rows() > 2 * d) throw ModelFormatError("gksl.U: more than 2d jump operators");
      s = validate_gksl(s, tol);
      mf.gksl = s;
      mf.dd = assemble(s, tol);
    } else {
      const json& p = root.at("phase_space");
      if (!p.is_object()) throw ModelFormatError("phase_space: expected an object");
      DriftDiffusion dd;
      dd.Z = detail::real_matrix(detail::field(p, "Z", "phase_space"), "phase_space.Z");
      dd.C = detail::real_matrix(detail::field(p, "C", "phase_space"), "phase_space.C");
      dd.zeta = detail::real_vector(detail::field(p, "zeta", "phase_space"), "phase_space.zeta");
      require_square_even(dd.Z, "phase_space.Z");
      if (dd.C.rows() != dd.Z.rows() || dd.C.cols() != dd.Z.cols())
        throw ModelFormatError("phase_space.C: shape " + std::to_string(dd.C.rows()) + "x" +
                               std::to_string(dd.C.cols()) + " does not match Z");
      if (dd.zeta.size() != dd.Z.rows())
        throw ModelFormatError("phase_space.zeta: length " + std::to_string(dd.zeta.size()) + " does not match Z");
      if (frob(dd.C - dd.C.transpose()) > tol * std::max(1.0, frob(dd.C)))
        throw ModelFormatError("phase_space.C: not symmetric");
      dd.C = 0.5 * (dd.C + dd.C.transpose());
      mf.dd = dd;
    }
  } catch (const ModelFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelFormatError(e.what());
  }
  return mf;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }
}

inline ModelFile load_model(const std::filesystem::path& path, double tol = kDefaultTol) {
  ModelFile mf = parse_model(read_json_file(path), tol);
  if (mf.name.empty()) mf.name = path.stem().string();
  return mf;
}

inline json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline json model_to_json(const ModelFile& mf) {
  json root;
  root["metadata"] = {{"name", mf.name}, {"description", mf.description}};
  auto rows = [](const Matrix& m) {
    json a = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      a.push_back(row);
    }
    return a;
  };
  auto crows = [](const CMatrix& m) {
    json a = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
      a.push_back(row);
    }
    return a;
  };
  if (mf.gksl) {
    json cz = json::array();
    for (Index i = 0; i < mf.gksl->zeta.size(); ++i) cz.push_back(complex_to_json(mf.gksl->zeta(i)));
    root["gksl"] = {{"Omega", crows(mf.gksl->Omega)}, {"kappa", crows(mf.gksl->kappa)}, {"zeta", cz},
                    {"U", crows(mf.gksl->U)}, {"V", crows(mf.gksl->V)}};
  } else {
    json z = json::array();
    for (Index i = 0; i < mf.dd.zeta.size(); ++i) z.push_back(mf.dd.zeta(i));
    root["phase_space"] = {{"Z", rows(mf.dd.Z)}, {"C", rows(mf.dd.C)}, {"zeta", z}};
  }
  return root;
}

// ---------------------------------------------------------------------------
// Report

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

/// Values in reports carry 15 significant digits; negative zero prints as 0.
inline double round15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline Vec to_vec(const Vector& v) {
  Vec out(v.size());
  for (Index i = 0; i < v.size(); ++i) out[i] = round15(v(i));
  return out;
}

inline Vec to_vec(const std::vector<double>& v) {
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = round15(v[i]);
  return out;
}

inline Mat to_mat(const Matrix& m) {
  Mat out(m.rows(), Vec(m.cols()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) out[r][c] = round15(m(r, c));
  return out;
}

/// A boolean result, or the precondition that made it inapplicable.
struct Flag {
  std::optional<bool> value;
  std::string not_applicable;
  bool operator==(const Flag&) const = default;

  static Flag of(bool v) { return {v, ""}; }
  static Flag na(std::string why) { return {std::nullopt, std::move(why)}; }
};

struct SpectrumSummary {
  std::vector<std::array<double, 2>> eigenvalues;
  int n_negative = 0;
  int n_imaginary = 0;
  int n_positive = 0;
  bool satisfies_H2 = false;
  bool imaginary_semisimple = false;
  bool operator==(const SpectrumSummary&) const = default;
};

struct ExistenceSummary {
  Flag exists;
  std::string reason;
  bool operator==(const ExistenceSummary&) const = default;
};

struct NormalFormSummary {
  std::string not_applicable;
  int d0 = 0;
  Vec angles;
  Vec signed_angles;
  int zero_angle_count = 0;
  Mat M;
  Vec w_center;
  std::optional<int> center_dimension;
  bool operator==(const NormalFormSummary&) const = default;
};

struct StationarySummary {
  std::string not_applicable;
  std::string coordinates;
  Vec mean;
  Mat covariance;
  Vec symplectic_eigenvalues;
  bool operator==(const StationarySummary&) const = default;
};

struct RationalSummary {
  std::string not_applicable;
  bool found = false;
  bool search_complete = true;
  std::vector<int> witness;
  bool operator==(const RationalSummary&) const = default;
};

struct FlagsSummary {
  Flag faithful;
  Flag irreducible;
  Flag ground_state;
  RationalSummary rational_dependence;
  bool operator==(const FlagsSummary&) const = default;
};

struct RecurrenceSummary {
  std::string not_applicable;
  int positive_recurrent_dim_defect = 0;
  int transient_dim = 0;
  bool null_recurrent_trivial = true;
  bool operator==(const RecurrenceSummary&) const = default;
};

struct GapSummary {
  Flag kms_holds;
  std::optional<double> kms_witness_min_eig;
  std::optional<double> decay_rate;
  std::string decay_not_applicable;
  bool operator==(const GapSummary&) const = default;
};

struct ClassicalSummary {
  Flag invariant_exists;
  Flag gram_limit_converged;
  Flag irreducible;
  Flag absolutely_continuous;
  bool operator==(const ClassicalSummary&) const = default;
};

struct AnalysisReport {
  std::string model_name;
  std::string description;
  double tol = kDefaultTol;
  int nmax = 12;
  int modes = 0;
  bool admissible = false;
  SpectrumSummary spectrum;
  ExistenceSummary existence;
  NormalFormSummary normal_form;
  StationarySummary stationary;
  FlagsSummary flags;
  RecurrenceSummary recurrence;
  GapSummary gap;
  ClassicalSummary classical_mirror;
  bool operator==(const AnalysisReport&) const = default;
};

struct AnalyzeOptions {
  double tol = kDefaultTol;
  int nmax = 12;
};

inline AnalysisReport analyze(const ModelFile& mf, const AnalyzeOptions& opt = {}) {
  const DriftDiffusion& dd = mf.dd;
  const double tol = opt.tol;
  AnalysisReport r;
  r.model_name = mf.name;
  r.description = mf.description;
  r.tol = tol;
  r.nmax = opt.nmax;
  r.modes = static_cast<int>(dd.modes());
  r.admissible = validate_admissibility(dd, tol);

  const SpectrumReport sp = classify_spectrum(dd.Z, tol);
  for (const Complex& l : sp.eigenvalues) r.spectrum.eigenvalues.push_back({round15(l.real()), round15(l.imag())});
  r.spectrum.n_negative = static_cast<int>(sp.class_negative.size());
  r.spectrum.n_imaginary = static_cast<int>(sp.class_imaginary.size());
  r.spectrum.n_positive = static_cast<int>(sp.class_positive.size());
  r.spectrum.satisfies_H2 = sp.satisfies_H2;
  r.spectrum.imaginary_semisimple = sp.imaginary_semisimple;

  const std::string inadmissible = "model violates the admissibility constraint";
  if (!r.admissible) {
    r.existence.exists = Flag::na(inadmissible);
    r.existence.reason = "not_applicable";
    r.normal_form.not_applicable = inadmissible;
    r.stationary.not_applicable = inadmissible;
    r.flags.faithful = r.flags.irreducible = r.flags.ground_state = Flag::na(inadmissible);
    r.flags.rational_dependence.not_applicable = inadmissible;
    r.recurrence.not_applicable = inadmissible;
    r.gap.kms_holds = Flag::na(inadmissible);
    r.gap.decay_not_applicable = inadmissible;
    r.classical_mirror.invariant_exists = r.classical_mirror.gram_limit_converged =
        r.classical_mirror.irreducible = r.classical_mirror.absolutely_continuous = Flag::na(inadmissible);
    return r;
  }

  const ExistenceVerdict v = decide_existence(dd, tol);
  r.existence.exists = Flag::of(v.exists);
  r.existence.reason = to_string(v.reason);
  const bool hamiltonian_data = frob(dd.C) <= tol * (1.0 + frob(dd.Z));
  r.flags.ground_state = hamiltonian_data ? Flag::of(ground_state_flag(dd, tol)) : Flag::na("C is nonzero");

  if (v.exists) {
    const NormalForm& nf = *v.normal_form;
    r.normal_form.d0 = static_cast<int>(nf.d0);
    r.normal_form.angles = to_vec(nf.Phi);
    r.normal_form.signed_angles = to_vec(nf.signed_angles);
    r.normal_form.zero_angle_count = static_cast<int>(nf.zero_angle_count);
    r.normal_form.M = to_mat(nf.M);
    r.normal_form.w_center = to_vec(nf.w_center);
    r.normal_form.center_dimension = 0;

    const InvariantSetDescriptor desc = invariant_set_descriptor(dd, tol, opt.nmax);
    r.stationary.coordinates = "normal_form_stable_block";
    r.stationary.mean = to_vec(desc.stationary.mean);
    r.stationary.covariance = to_mat(desc.stationary.covariance);
    if (desc.stationary.covariance.rows() > 0)
      r.stationary.symplectic_eigenvalues = to_vec(williamson(desc.stationary.covariance, tol).nu);
    else
      r.stationary.not_applicable = "no stable block";
    r.flags.faithful = Flag::of(desc.faithful);
    r.flags.irreducible = Flag::of(desc.irreducible);
    r.flags.rational_dependence.found = desc.rational_dependence.found;
    r.flags.rational_dependence.search_complete = desc.rational_dependence.search_complete;
    r.flags.rational_dependence.witness = desc.rational_dependence.witness;
    const RecurrenceClassification rc = recurrence_classification(desc);
    r.recurrence.positive_recurrent_dim_defect = static_cast<int>(rc.positive_recurrent_dim_defect);
    r.recurrence.transient_dim = static_cast<int>(rc.transient_dim);
    r.recurrence.null_recurrent_trivial = rc.null_recurrent_trivial;
    if (nf.Z_minus.rows() == 0) {
      r.gap.kms_holds = Flag::na("no stable block");
      r.gap.decay_not_applicable = "no stable block";
    } else {
      r.gap.decay_rate = round15(decay_rate_estimate(nf.Z_minus));
      if (desc.faithful) {
        const KmsGapResult k = kms_gap_condition(nf.Z_minus, desc.stationary.covariance, tol);
        r.gap.kms_holds = Flag::of(k.holds);
        r.gap.kms_witness_min_eig = round15(k.witness_min_eig);
      } else {
        r.gap.kms_holds = Flag::na("stationary state is not faithful");
      }
    }
  } else {
    const std::string why = "no invariant state (" + r.existence.reason + ")";
    r.normal_form.not_applicable = why;
    r.stationary.not_applicable = why;
    r.flags.faithful = Flag::na(why);
    r.flags.irreducible = Flag::na(why);
    r.flags.rational_dependence.not_applicable = why;
    r.recurrence.not_applicable = why;
    r.gap.kms_holds = Flag::na(why);
    r.gap.decay_not_applicable = why;
  }

  try {
    const OuModel ou = quantum_classical_correspondence(dd, tol);
    r.classical_mirror.invariant_exists = Flag::of(ou_invariant_exists(ou, tol).exists);
    r.classical_mirror.gram_limit_converged = Flag::of(ou_gram_limit(ou).converged);
    r.classical_mirror.irreducible = Flag::of(ou_irreducible(ou, tol));
    r.classical_mirror.absolutely_continuous = Flag::of(ou_normal_form(ou, tol).exists_absolutely_continuous);
  } catch (const PreconditionError& e) {
    r.classical_mirror.invariant_exists = r.classical_mirror.gram_limit_converged =
        r.classical_mirror.irreducible = r.classical_mirror.absolutely_continuous = Flag::na(e.what());
  }
  return r;
}

// -- serialization ----------------------------------------------------------

inline json flag_json(const Flag& f) {
  json j;
  if (f.value)
    j["value"] = *f.value;
  else
    j["value"] = nullptr;
  if (!f.not_applicable.empty()) j["not_applicable"] = f.not_applicable;
  return j;
}

inline Flag flag_from(const json& j) {
  Flag f;
  if (!j.at("value").is_null()) f.value = j.at("value").get<bool>();
  if (j.contains("not_applicable")) f.not_applicable = j.at("not_applicable").get<std::string>();
  return f;
}

inline json mat_json(const Mat& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(row);
  return a;
}

inline json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

inline std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

inline void put_na(json& j, const std::string& why) {
  if (!why.empty()) j["not_applicable"] = why;
}

inline std::string na_from(const json& j) {
  return j.contains("not_applicable") ? j.at("not_applicable").get<std::string>() : std::string();
}

inline json report_to_json(const AnalysisReport& r) {
  json j;
  j["model_name"] = r.model_name;
  j["description"] = r.description;
  j["tol"] = r.tol;
  j["nmax"] = r.nmax;
  j["modes"] = r.modes;
  j["admissible"] = r.admissible;

  json sp;
  json ev = json::array();
  for (const auto& e : r.spectrum.eigenvalues) ev.push_back(json::array({e[0], e[1]}));
  sp["eigenvalues"] = ev;
  sp["n_negative"] = r.spectrum.n_negative;
  sp["n_imaginary"] = r.spectrum.n_imaginary;
  sp["n_positive"] = r.spectrum.n_positive;
  sp["satisfies_H2"] = r.spectrum.satisfies_H2;
  sp["imaginary_semisimple"] = r.spectrum.imaginary_semisimple;
  j["spectrum"] = sp;

  j["existence"] = {{"exists", flag_json(r.existence.exists)}, {"reason", r.existence.reason}};

  json nf;
  put_na(nf, r.normal_form.not_applicable);
  nf["d0"] = r.normal_form.d0;
  nf["angles"] = r.normal_form.angles;
  nf["signed_angles"] = r.normal_form.signed_angles;
  nf["zero_angle_count"] = r.normal_form.zero_angle_count;
  nf["M"] = mat_json(r.normal_form.M);
  nf["w_center"] = r.normal_form.w_center;
  nf["center_dimension"] = r.normal_form.center_dimension ? json(*r.normal_form.center_dimension) : json("not computed");
  j["normal_form"] = nf;

  json st;
  put_na(st, r.stationary.not_applicable);
  st["coordinates"] = r.stationary.coordinates;
  st["mean"] = r.stationary.mean;
  st["covariance"] = mat_json(r.stationary.covariance);
  st["symplectic_eigenvalues"] = r.stationary.symplectic_eigenvalues;
  j["stationary"] = st;

  json rd;
  put_na(rd, r.flags.rational_dependence.not_applicable);
  rd["found"] = r.flags.rational_dependence.found;
  rd["search_complete"] = r.flags.rational_dependence.search_complete;
  rd["witness"] = r.flags.rational_dependence.witness;
  j["flags"] = {{"faithful", flag_json(r.flags.faithful)},
                {"irreducible", flag_json(r.flags.irreducible)},
                {"ground_state", flag_json(r.flags.ground_state)},
                {"rational_dependence", rd}};

  json rc;
  put_na(rc, r.recurrence.not_applicable);
  rc["positive_recurrent_dim_defect"] = r.recurrence.positive_recurrent_dim_defect;
  rc["transient_dim"] = r.recurrence.transient_dim;
  rc["null_recurrent_trivial"] = r.recurrence.null_recurrent_trivial;
  j["recurrence"] = rc;

  json gp;
  gp["kms_holds"] = flag_json(r.gap.kms_holds);
  gp["kms_witness_min_eig"] = opt_json(r.gap.kms_witness_min_eig);
  gp["decay_rate"] = opt_json(r.gap.decay_rate);
  if (!r.gap.decay_not_applicable.empty()) gp["decay_not_applicable"] = r.gap.decay_not_applicable;
  j["gap"] = gp;

  j["classical_mirror"] = {{"invariant_exists", flag_json(r.classical_mirror.invariant_exists)},
                           {"gram_limit_converged", flag_json(r.classical_mirror.gram_limit_converged)},
                           {"irreducible", flag_json(r.classical_mirror.irreducible)},
                           {"absolutely_continuous", flag_json(r.classical_mirror.absolutely_continuous)}};
  return j;
}

inline AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  r.model_name = j.at("model_name").get<std::string>();
  r.description = j.at("description").get<std::string>();
  r.tol = j.at("tol").get<double>();
  r.nmax = j.at("nmax").get<int>();
  r.modes = j.at("modes").get<int>();
  r.admissible = j.at("admissible").get<bool>();

  const json& sp = j.at("spectrum");
  for (const auto& e : sp.at("eigenvalues")) r.spectrum.eigenvalues.push_back({e[0].get<double>(), e[1].get<double>()});
  r.spectrum.n_negative = sp.at("n_negative").get<int>();
  r.spectrum.n_imaginary = sp.at("n_imaginary").get<int>();
  r.spectrum.n_positive = sp.at("n_positive").get<int>();
  r.spectrum.satisfies_H2 = sp.at("satisfies_H2").get<bool>();
  r.spectrum.imaginary_semisimple = sp.at("imaginary_semisimple").get<bool>();

  r.existence.exists = flag_from(j.at("existence").at("exists"));
  r.existence.reason = j.at("existence").at("reason").get<std::string>();

  const json& nf = j.at("normal_form");
  r.normal_form.not_applicable = na_from(nf);
  r.normal_form.d0 = nf.at("d0").get<int>();
  r.normal_form.angles = nf.at("angles").get<Vec>();
  r.normal_form.signed_angles = nf.at("signed_angles").get<Vec>();
  r.normal_form.zero_angle_count = nf.at("zero_angle_count").get<int>();
  r.normal_form.M = nf.at("M").get<Mat>();
  r.normal_form.w_center = nf.at("w_center").get<Vec>();
  if (nf.at("center_dimension").is_number()) r.normal_form.center_dimension = nf.at("center_dimension").get<int>();

  const json& st = j.at("stationary");
  r.stationary.not_applicable = na_from(st);
  r.stationary.coordinates = st.at("coordinates").get<std::string>();
  r.stationary.mean = st.at("mean").get<Vec>();
  r.stationary.covariance = st.at("covariance").get<Mat>();
  r.stationary.symplectic_eigenvalues = st.at("symplectic_eigenvalues").get<Vec>();

  const json& fl = j.at("flags");
  r.flags.faithful = flag_from(fl.at("faithful"));
  r.flags.irreducible = flag_from(fl.at("irreducible"));
  r.flags.ground_state = flag_from(fl.at("ground_state"));
  const json& rd = fl.at("rational_dependence");
  r.flags.rational_dependence.not_applicable = na_from(rd);
  r.flags.rational_dependence.found = rd.at("found").get<bool>();
  r.flags.rational_dependence.search_complete = rd.at("search_complete").get<bool>();
  r.flags.rational_dependence.witness = rd.at("witness").get<std::vector<int>>();

  const json& rc = j.at("recurrence");
  r.recurrence.not_applicable = na_from(rc);
  r.recurrence.positive_recurrent_dim_defect = rc.at("positive_recurrent_dim_defect").get<int>();
  r.recurrence.transient_dim = rc.at("transient_dim").get<int>();
  r.recurrence.null_recurrent_trivial = rc.at("null_recurrent_trivial").get<bool>();

  const json& gp = j.at("gap");
  r.gap.kms_holds = flag_from(gp.at("kms_holds"));
  r.gap.kms_witness_min_eig = opt_from(gp.at("kms_witness_min_eig"));
  r.gap.decay_rate = opt_from(gp.at("decay_rate"));
  if (gp.contains("decay_not_applicable")) r.gap.decay_not_applicable = gp.at("decay_not_applicable").get<std::string>();

  const json& cm = j.at("classical_mirror");
  r.classical_mirror.invariant_exists = flag_from(cm.at("invariant_exists"));
  r.classical_mirror.gram_limit_converged = flag_from(cm.at("gram_limit_converged"));
  r.classical_mirror.irreducible = flag_from(cm.at("irreducible"));
  r.classical_mirror.absolutely_continuous = flag_from(cm.at("absolutely_continuous"));
  return r;
}

inline std::string flag_text(const Flag& f) {
  if (f.value) return *f.value ? "yes" : "no";
  return "n/a (" + f.not_applicable + ")";
}

inline std::string report_to_text(const AnalysisReport& r) {
  std::ostringstream os;
  os.precision(15);
  os << "model: " << r.model_name << "\n";
  os << "modes: " << r.modes << "\n";
  os << "admissible: " << (r.admissible ? "yes" : "no") << "\n";
  os << "spectrum: " << r.spectrum.n_negative << " stable, " << r.spectrum.n_imaginary << " imaginary, "
     << r.spectrum.n_positive << " unstable\n";
  os << "invariant state: " << flag_text(r.existence.exists) << " [" << r.existence.reason << "]\n";
  if (r.normal_form.not_applicable.empty()) {
    os << "d0: " << r.normal_form.d0 << "\nangles:";
    for (double a : r.normal_form.signed_angles) os << " " << a;
    os << "\n";
  }
  os << "faithful: " << flag_text(r.flags.faithful) << "\n";
  os << "irreducible: " << flag_text(r.flags.irreducible) << "\n";
  os << "ground state: " << flag_text(r.flags.ground_state) << "\n";
  os << "kms gap: " << flag_text(r.gap.kms_holds) << "\n";
  if (r.gap.decay_rate) os << "decay rate: " << *r.gap.decay_rate << "\n";
  os << "classical invariant measure (b = 0 criterion): " << flag_text(r.classical_mirror.invariant_exists) << "\n";
  os << "classical absolutely continuous invariant measure: " << flag_text(r.classical_mirror.absolutely_continuous) << "\n";
  os << "classical irreducible: " << flag_text(r.classical_mirror.irreducible) << "\n";
  return os.str();
}

inline std::string dump_report(const AnalysisReport& r) { return report_to_json(r).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Trajectory export

struct EvolveOptions {
  double t_end = 1.0;
  Index steps = 100;
  std::optional<Vector> probe;
  int precision = 9;
  double tol = kDefaultTol;
};

/// Comma-separated table: t, mean components, covariance upper triangle, eid_defect.
inline std::string evolve_table(const DriftDiffusion& dd, const Vector& m0, const Matrix& sigma0,
                                const EvolveOptions& opt) {
  const Index n = dd.Z.rows();
  const Trajectory tr = evolve_moments(dd, m0, sigma0, uniform_grid(opt.t_end, opt.steps), opt.tol);
  Vector probe = opt.probe.value_or(Vector::Unit(n, 0));
  if (probe.size() != n) throw DimensionError("evolve: probe length does not match the model");
  std::optional<SpectralSplit> split;
  const ExistenceVerdict v = decide_existence(dd, opt.tol);
  if (v.exists) split = invariant_splitting(dd.Z, opt.tol);

  auto fmt = [&](double x) {
    if (std::isnan(x)) return std::string("nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", opt.precision, x == 0.0 ? 0.0 : x);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "t";
  for (Index i = 0; i < n; ++i) os << ",m" << i;
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) os << ",S" << i << "_" << j;
  os << ",eid_defect\n";
  for (size_t k = 0; k < tr.times.size(); ++k) {
    os << fmt(tr.times[k]);
    for (Index i = 0; i < n; ++i) os << "," << fmt(tr.means[k](i));
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) os << "," << fmt(tr.covariances[k](i, j));
    const double defect = split ? eid_defect(dd, *split, probe, tr.times[k]) : std::nan("");
    os << "," << fmt(defect) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Batch

struct BatchResult {
  std::vector<std::string> analyzed;
  std::vector<std::pair<std::string, std::string>> failures;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string summary_cell(const Flag& f) { return f.value ? (*f.value ? "true" : "false") : "na"; }

inline BatchResult run_batch(const std::filesystem::path& dir, const std::filesystem::path& out_dir,
                             const AnalyzeOptions& opt = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + ": not a readable directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& p = entry.path();
    const std::string name = p.filename().string();
    if (!entry.is_regular_file() || p.extension() != ".json") continue;
    if (name.size() >= 12 && name.compare(name.size() - 12, 12, ".report.json") == 0) continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(out_dir);
  BatchResult res;
  std::ostringstream summary;
  summary << "name,exists,d0,faithful,irreducible,gap_holds\n";
  for (const auto& p : files) {
    const std::string stem = p.stem().string();
    try {
      const ModelFile mf = load_model(p, opt.tol);
      const AnalysisReport r = analyze(mf, opt);
      std::ofstream(out_dir / (stem + ".report.json")) << dump_report(r);
      summary << csv_field(stem) << "," << summary_cell(r.existence.exists) << ","
              << (r.normal_form.not_applicable.empty() ? std::to_string(r.normal_form.d0) : "na") << ","
              << summary_cell(r.flags.faithful) << "," << summary_cell(r.flags.irreducible) << ","
              << summary_cell(r.gap.kms_holds) << "\n";
      res.analyzed.push_back(stem);
    } catch (const std::exception& e) {
      res.failures.emplace_back(stem, e.what());
    }
  }
  std::ofstream(out_dir / "summary.csv") << summary.str();
  std::ofstream fails(out_dir / "failures.csv");
  fails << "name,error\n";
  for (const auto& [n, e] : res.failures) fails << csv_field(n) << "," << csv_field(e) << "\n";
  return res;
}

}  // namespace gqms::io
