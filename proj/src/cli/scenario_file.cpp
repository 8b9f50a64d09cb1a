#include "cli/scenario_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace specshape::cli {

namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects whatever is left unread.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw InputError(where_ + " must be a JSON object");
  }

  const json* find(const std::string& key) {
    const auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) throw InputError(where_ + ": missing key '" + key + "'");
    return *v;
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw InputError(where_ + ": '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(where_ + ": '" + key + "' must be finite");
    return x;
  }

  std::optional<double> opt_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return number(*v, key);
  }

  // `name` in linear units or `name_db` in decibels, never both.
  std::optional<double> opt_level(const std::string& name) {
    const json* linear = find(name);
    const json* db = find(name + "_db");
    if (linear && db) throw InputError(where_ + ": give either '" + name + "' or '" + name + "_db', not both");
    if (linear) return number(*linear, name);
    if (db) return db_to_linear(number(*db, name + "_db"));
    return std::nullopt;
  }

  double level(const std::string& name) {
    const auto v = opt_level(name);
    if (!v) throw InputError(where_ + ": missing '" + name + "' (or '" + name + "_db')");
    return *v;
  }

  double level_or(const std::string& name, double fallback) { return opt_level(name).value_or(fallback); }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!used_.count(item.key())) throw InputError(where_ + ": unknown key '" + item.key() + "'");
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> used_;
};

std::vector<double> number_list(const json& v, const std::string& what) {
  if (!v.is_array()) throw InputError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) throw InputError(what + " must hold finite numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::complex<double> complex_value(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw InputError(what + ": entries must be numbers or [re, im] pairs");
}

Eigen::MatrixXcd complex_matrix(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
    throw InputError(what + " must be a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  Eigen::MatrixXcd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InputError(what + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = complex_value(row[static_cast<std::size_t>(c)], what);
  }
  return M;
}

Eigen::VectorXcd complex_vector(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw InputError(what + " must be a nonempty array");
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(k)) = complex_value(v[k], what);
  return out;
}

SpectrumSpec parse_spectrum(const json& v, const std::string& what) {
  SpectrumSpec spec;
  if (v.is_string()) {
    const auto type = v.get<std::string>();
    if (type == "flat") return spec;
    throw InputError(what + ": only \"flat\" may be given as a bare string");
  }
  ObjectReader r(v, what);
  const json& type_json = r.require("type");
  if (!type_json.is_string()) throw InputError(what + ": 'type' must be a string");
  const auto type = type_json.get<std::string>();
  if (type == "flat") {
    spec.kind = SpectrumSpec::Kind::Flat;
  } else if (type == "ar1") {
    spec.kind = SpectrumSpec::Kind::Ar1;
    spec.epsilon = r.number(r.require("epsilon"), "epsilon");
  } else if (type == "table") {
    spec.kind = SpectrumSpec::Kind::Table;
    spec.table_omega = number_list(r.require("omega"), what + ".omega");
    spec.table_values = number_list(r.require("values"), what + ".values");
    if (spec.table_omega.size() != spec.table_values.size() || spec.table_omega.size() < 2) {
      throw InputError(what + ": table needs matching omega and values arrays of length >= 2");
    }
    if (!std::is_sorted(spec.table_omega.begin(), spec.table_omega.end()) ||
        std::adjacent_find(spec.table_omega.begin(), spec.table_omega.end()) != spec.table_omega.end()) {
      throw InputError(what + ": table omegas must be strictly increasing");
    }
  } else {
    throw InputError(what + ": unknown spectrum type '" + type + "'");
  }
  r.finish();
  return spec;
}

PowerSweep parse_sweep(const json& v) {
  ObjectReader r(v, "power_sweep");
  PowerSweep sweep;
  sweep.start_db = r.number(r.require("start_db"), "start_db");
  sweep.stop_db = r.number(r.require("stop_db"), "stop_db");
  const json& points = r.require("points");
  if (!points.is_number_integer() || points.get<long long>() < 0) {
    throw InputError("power_sweep: 'points' must be a nonnegative integer");
  }
  sweep.points = points.get<std::size_t>();
  if (sweep.points >= 2 && !(sweep.stop_db > sweep.start_db)) {
    throw InputError("power_sweep: 'stop_db' must exceed 'start_db'");
  }
  r.finish();
  return sweep;
}

PrelogMesh parse_mesh(const json& v) {
  ObjectReader r(v, "mesh");
  PrelogMesh mesh;
  mesh.d_ratio = number_list(r.require("d_ratio"), "mesh.d_ratio");
  mesh.snr_db = number_list(r.require("snr_db"), "mesh.snr_db");
  for (double d : mesh.d_ratio) {
    if (!(d > 0.0)) throw InputError("mesh.d_ratio entries must be positive");
  }
  r.finish();
  return mesh;
}

void read_power(ObjectReader& r, std::optional<double>& P, std::optional<PowerSweep>& sweep) {
  P = r.opt_level("P");
  if (const json* s = r.find("power_sweep")) sweep = parse_sweep(*s);
}

SpectrumSpec opt_spectrum(ObjectReader& r, const std::string& key) {
  const json* v = r.find(key);
  return v ? parse_spectrum(*v, key) : SpectrumSpec{};
}

// Legacy rate in nats, either absolute (file units) or a fraction of C_l.
double read_legacy_rate(ObjectReader& r, double legacy_capacity, LogBase base) {
  const json* absolute = r.find("R_l");
  const json* fraction = r.find("R_l_fraction");
  if (absolute && fraction) throw InputError(r.where() + ": give either 'R_l' or 'R_l_fraction', not both");
  if (absolute) return to_nats(r.number(*absolute, "R_l"), base);
  if (fraction) return r.number(*fraction, "R_l_fraction") * legacy_capacity;
  throw InputError(r.where() + ": missing 'R_l' (or 'R_l_fraction')");
}

UncodedFile parse_uncoded(ObjectReader& r) {
  UncodedFile f;
  f.sigma2_s = r.level_or("sigma2_s", 1.0);
  f.sigma2_n = r.level_or("sigma2_n", 1.0);
  f.legacy_psd = opt_spectrum(r, "legacy_psd");
  f.noise_psd = opt_spectrum(r, "noise_psd");
  f.a = r.level_or("a", 1.0);
  f.D = r.opt_level("D");
  read_power(r, f.P, f.sweep);
  if (const json* m = r.find("mesh")) f.mesh = parse_mesh(*m);
  return f;
}

MultiLegacyFile parse_multilegacy(ObjectReader& r) {
  MultiLegacyFile f;
  f.sigma2_s = r.level_or("sigma2_s", 1.0);
  f.legacy_psd = opt_spectrum(r, "legacy_psd");
  f.a0 = r.level_or("a0", 1.0);
  f.g0 = r.level_or("g0", 1.0);
  const json& list = r.require("receivers");
  if (!list.is_array() || list.empty()) throw InputError("receivers must be a nonempty array");
  for (std::size_t k = 0; k < list.size(); ++k) {
    ObjectReader rr(list[k], "receivers[" + std::to_string(k) + "]");
    ReceiverSpec rx;
    rx.a = rr.level("a");
    rx.sigma2_n = rr.level_or("sigma2_n", 1.0);
    rx.noise_psd = opt_spectrum(rr, "noise_psd");
    rx.D = rr.level("D");
    rx.g = rr.level_or("g", 1.0);
    rr.finish();
    f.receivers.push_back(rx);
  }
  return f;
}

CodedFile parse_coded(ObjectReader& r, LogBase base) {
  CodedFile f;
  auto& s = f.scenario;
  s.a_l = r.level_or("a_l", 1.0);
  s.g_l = r.level_or("g_l", 1.0);
  s.a_c = r.level_or("a_c", 1.0);
  s.g_c = r.level_or("g_c", 1.0);
  s.sigma2_s = r.level_or("sigma2_s", 1.0);
  s.sigma2_nl = r.level_or("sigma2_nl", 1.0);
  s.sigma2_nc = r.level_or("sigma2_nc", 1.0);
  s.R_l = read_legacy_rate(r, s.legacy_capacity(), base);
  read_power(r, f.P, f.sweep);
  s.P = f.P.value_or(1.0);
  return f;
}

MimoFile parse_mimo(ObjectReader& r, LogBase base) {
  MimoFile f;
  auto& ch = f.channel;
  ch.H_c = complex_matrix(r.require("H_c"), "H_c");
  ch.h_l = complex_vector(r.require("h_l"), "h_l").transpose();
  ch.h_c = complex_vector(r.require("h_c"), "h_c");
  ch.a_l = r.level_or("a_l", 1.0);
  ch.g_l = r.level_or("g_l", 1.0);
  ch.a_c = r.level_or("a_c", 1.0);
  ch.g_c = r.level_or("g_c", 1.0);
  ch.sigma2_s = r.level_or("sigma2_s", 1.0);
  ch.sigma2_nl = r.level_or("sigma2_nl", 1.0);
  ch.sigma2_nc = r.level_or("sigma2_nc", 1.0);
  ch.R_l = read_legacy_rate(r, ch.legacy_capacity(), base);
  if (const json* q = r.find("on_shape")) f.on_shape = complex_matrix(*q, "on_shape");
  read_power(r, f.P, f.sweep);
  return f;
}

}  // namespace

std::vector<double> PowerSweep::powers() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
    out.push_back(db_to_linear(start_db + t * (stop_db - start_db)));
  }
  return out;
}

Spectrum SpectrumSpec::build(const GridPtr& grid, double variance) const {
  switch (kind) {
    case Kind::Flat: return flat_spectrum(grid, variance);
    case Kind::Ar1: return ar1_spectrum(grid, variance, epsilon);
    case Kind::Table: {
      std::vector<double> values(grid->size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = grid->omega(i);
        const auto hi = std::upper_bound(table_omega.begin(), table_omega.end(), w);
        if (hi == table_omega.begin()) {
          values[i] = table_values.front();
        } else if (hi == table_omega.end()) {
          values[i] = table_values.back();
        } else {
          const auto k = static_cast<std::size_t>(hi - table_omega.begin());
          const double t = (w - table_omega[k - 1]) / (table_omega[k] - table_omega[k - 1]);
          values[i] = (1.0 - t) * table_values[k - 1] + t * table_values[k];
        }
      }
      return Spectrum(grid, std::move(values));
    }
  }
  throw InputError("unknown spectrum kind");
}

UncodedScenario UncodedFile::build(const GridPtr& grid) const {
  if (!D) throw InputError("uncoded scenario: missing 'D' (or 'D_db')");
  return UncodedScenario{a, legacy_psd.build(grid, sigma2_s), noise_psd.build(grid, sigma2_n), *D, P.value_or(1.0)};
}

MultiLegacyScenario MultiLegacyFile::build(const GridPtr& grid) const {
  MultiLegacyScenario out{legacy_psd.build(grid, sigma2_s), {}, a0, g0};
  for (const auto& rx : receivers) out.receivers.push_back({rx.a, rx.noise_psd.build(grid, rx.sigma2_n), rx.D, rx.g});
  return out;
}

ScenarioFile parse_scenario(const json& doc, LogBase base) {
  ObjectReader r(doc, "scenario");
  const json& kind_json = r.require("kind");
  if (!kind_json.is_string()) throw InputError("scenario: 'kind' must be a string");
  const auto kind = kind_json.get<std::string>();

  ScenarioFile out{UncodedFile{}, std::nullopt};
  if (const json* g = r.find("grid_points")) {
    if (!g->is_number_integer() || g->get<long long>() < static_cast<long long>(FrequencyGrid::kMinPoints)) {
      throw InputError("scenario: 'grid_points' must be an integer >= " + std::to_string(FrequencyGrid::kMinPoints));
    }
    out.grid_points = g->get<std::size_t>();
  }
  if (kind == "uncoded") {
    out.body = parse_uncoded(r);
  } else if (kind == "multilegacy") {
    out.body = parse_multilegacy(r);
  } else if (kind == "coded") {
    out.body = parse_coded(r, base);
  } else if (kind == "mimo") {
    out.body = parse_mimo(r, base);
  } else {
    throw InputError("scenario: unknown kind '" + kind + "'");
  }
  r.finish();
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path, LogBase base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  return parse_scenario(doc, base);
}

}  // namespace specshape::cli
