#include "cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "CLI11.hpp"
#include "cli/worker_pool.hpp"
#include "specshape/errors.hpp"
#include "specshape/shaping.hpp"

namespace specshape::cli {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double num(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x));
}

json number_array(std::span<const double> xs) {
  json out = json::array();
  for (double x : xs) out.push_back(num(x));
  return out;
}

json complex_matrix_json(const Eigen::MatrixXcd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back({num(M(r, c).real()), num(M(r, c).imag())});
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> require_sweep(const std::optional<PowerSweep>& sweep) {
  if (!sweep) throw InputError("rate-curve needs a 'power_sweep' entry");
  return sweep->powers();
}

double require_power(const std::optional<double>& P) {
  if (!P) throw InputError("solve needs a power budget 'P' (or 'P_db')");
  return *P;
}

void require_above_floor(const UncodedScenario& scenario) {
  scenario.validate();
  const double floor = wk_floor(scenario);
  if (scenario.D < floor * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "distortion target " << scenario.D << " is below the Wiener-Kolmogorov floor " << floor;
    throw InfeasibleError(msg.str());
  }
}

void require_feasible(const CodedScenario& scenario) {
  scenario.validate();
  if (!scenario.feasible()) throw InfeasibleError("legacy rate is not below the legacy capacity");
}

std::string uncoded_curve(const UncodedFile& f, const GridPtr& grid, const Options& o) {
  const UncodedScenario base = f.build(grid);
  require_above_floor(base);
  const auto powers = require_sweep(f.sweep);
  struct Row {
    double it;
    double shaping;
  };
  const auto rows = parallel_map<Row>(powers.size(), o.threads, [&](std::size_t k) {
    const UncodedScenario point = base.with_power(powers[k]);
    const RatePoint it = interference_temperature_rate(point);
    const ShapingSolution sh = solve_shaping(point);
    return Row{it.feasible ? it.rate : 0.0, sh.case_tag == ShapingCase::Infeasible ? 0.0 : sh.rate};
  });
  std::string out = "P_db,rate_it,rate_shaping\n";
  for (std::size_t k = 0; k < powers.size(); ++k) {
    out += format_number(linear_to_db(powers[k])) + "," + format_number(nats_to(rows[k].it, o.log_base)) + "," +
           format_number(nats_to(rows[k].shaping, o.log_base)) + "\n";
  }
  return out;
}

std::string coded_curve(const CodedFile& f, const Options& o) {
  require_feasible(f.scenario);
  const auto powers = require_sweep(f.sweep);
  const auto rows = parallel_map<CodedSolution>(powers.size(), o.threads, [&](std::size_t k) {
    return solve_coded(f.scenario.with_power(powers[k]));
  });
  std::string out = "P_db,rate,case_tag\n";
  for (std::size_t k = 0; k < powers.size(); ++k) {
    out += format_number(linear_to_db(powers[k])) + "," + format_number(nats_to(rows[k].rate, o.log_base)) + "," +
           std::string(to_string(rows[k].case_tag)) + "\n";
  }
  return out;
}

std::string mimo_curve(const MimoFile& f, const GridPtr& grid, const Options& o) {
  const auto powers = require_sweep(f.sweep);
  struct Row {
    double rate;
    DecodeMode mode;
  };
  const auto rows = parallel_map<Row>(powers.size(), o.threads, [&](std::size_t k) {
    const MimoSolution s = solve_mimo(f.channel, powers[k], grid, f.on_shape);
    return Row{s.rate, s.mode};
  });
  std::string out = "P_db,rate,mode\n";
  for (std::size_t k = 0; k < powers.size(); ++k) {
    out += format_number(linear_to_db(powers[k])) + "," + format_number(nats_to(rows[k].rate, o.log_base)) + "," +
           std::string(to_string(rows[k].mode)) + "\n";
  }
  return out;
}

json spectrum_json(const Spectrum& s) {
  json out;
  out["omega"] = number_array(s.grid().omegas());
  out["values"] = number_array(s.values());
  const auto occ = s.occupancy_vector();
  out["occupancy"] = number_array(occ);
  return out;
}

json prelog_json(const PrelogResult& p) {
  return json{{"prelog", num(p.prelog)},
              {"gamma", num(p.gamma)},
              {"support_fraction", num(p.support_fraction)},
              {"clipped_integral", num(p.clipped_integral)},
              {"target", num(p.target)}};
}

json solve_uncoded(const UncodedFile& f, const GridPtr& grid, const Options& o) {
  UncodedScenario scenario = f.build(grid);
  scenario.P = require_power(f.P);
  require_above_floor(scenario);
  const ShapingSolution sol = solve_shaping(scenario);
  const RatePoint it = interference_temperature_rate(scenario);
  json out;
  out["kind"] = "uncoded";
  out["case_tag"] = std::string(to_string(sol.case_tag));
  out["rate"] = num(nats_to(sol.rate, o.log_base));
  out["rate_interference_temperature"] = num(nats_to(it.feasible ? it.rate : 0.0, o.log_base));
  out["mse"] = num(sol.mse);
  out["mse_residual"] = num(sol.mse - scenario.D);
  out["power"] = num(sol.power);
  out["power_residual"] = num(sol.power - scenario.P);
  out["lambda"] = num(sol.lambda);
  out["mu"] = num(sol.mu);
  out["water_level"] = num(sol.water_level);
  out["support_fraction"] = num(sol.support_fraction());
  out["wk_floor"] = num(wk_floor(scenario));
  out["note"] = sol.note;
  out["prelog"] = prelog_json(onoff_prelog(scenario));
  out["psd"] = spectrum_json(sol.phi_x);
  return out;
}

json multi_json(const MultiPrelogResult& r) {
  return json{{"feasible", r.feasible},
              {"prelog", num(r.prelog)},
              {"budgets", number_array(r.budgets)},
              {"clipped_integrals", number_array(r.clipped_integrals)},
              {"occupancy", number_array(r.occupancy)}};
}

json solve_multilegacy(const MultiLegacyFile& f, const GridPtr& grid) {
  const MultiLegacyScenario scenario = f.build(grid);
  scenario.validate();
  json out;
  out["kind"] = "multilegacy";
  json floors = json::array();
  for (std::size_t k = 0; k < scenario.receivers.size(); ++k) floors.push_back(num(per_receiver_floor(scenario, k)));
  out["floors"] = floors;
  out["max_prelog_support"] = multi_json(max_prelog_support(scenario));
  const bool flat_noise = std::all_of(scenario.receivers.begin(), scenario.receivers.end(),
                                      [](const LegacyReceiver& rx) { return rx.phi_n.is_flat(); });
  out["low_noise_support"] = flat_noise ? multi_json(low_noise_support(scenario)) : json(nullptr);
  out["omega"] = number_array(grid->omegas());
  return out;
}

json solve_coded_file(const CodedFile& f, const Options& o) {
  const CodedScenario scenario = f.scenario.with_power(require_power(f.P));
  require_feasible(scenario);
  const CodedSolution sol = solve_coded(scenario);
  json out;
  out["kind"] = "coded";
  out["class"] = classify(scenario) == CodedClass::A ? "A" : "B";
  out["case_tag"] = std::string(to_string(sol.case_tag));
  out["rate"] = num(nats_to(sol.rate, o.log_base));
  out["support_fraction"] = num(sol.support_fraction);
  out["level"] = num(sol.level);
  out["legacy_residual"] = num(nats_to(sol.legacy_residual, o.log_base));
  out["decodability_residual"] = num(nats_to(sol.decodability_residual, o.log_base));
  out["legacy_capacity"] = num(nats_to(scenario.legacy_capacity(), o.log_base));
  out["R_l"] = num(nats_to(scenario.R_l, o.log_base));
  out["prelog"] = num(coded_prelog(scenario));
  return out;
}

json solve_mimo_file(const MimoFile& f, const GridPtr& grid, const Options& o) {
  const MimoSolution sol = solve_mimo(f.channel, require_power(f.P), grid, f.on_shape);
  json out;
  out["kind"] = "mimo";
  out["mode"] = std::string(to_string(sol.mode));
  out["rate"] = num(nats_to(sol.rate, o.log_base));
  out["support_fraction"] = num(sol.support_fraction);
  out["legacy_residual"] = num(nats_to(sol.legacy_residual, o.log_base));
  out["decodability_residual"] = num(nats_to(sol.decodability_residual, o.log_base));
  out["trace_power"] = num(trace_power(sol.psd));
  out["rank"] = channel_rank(f.channel.H_c);
  out["prelog"] = num(mimo_prelog(f.channel));
  Eigen::MatrixXcd level = Eigen::MatrixXcd::Zero(sol.psd.dims(), sol.psd.dims());
  if (sol.psd.occupancy(0) > 0.0) level = sol.psd[0];
  out["on_level"] = complex_matrix_json(level);
  return out;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::size_t resolve_grid(const ScenarioFile& file, const Options& options) {
  const std::size_t n = options.grid_points.value_or(file.grid_points.value_or(FrequencyGrid::kDefaultPoints));
  if (n < FrequencyGrid::kMinPoints) {
    throw InputError("grid needs at least " + std::to_string(FrequencyGrid::kMinPoints) + " points");
  }
  return n;
}

std::string rate_curve_csv(const ScenarioFile& file, const Options& options) {
  const GridPtr grid = make_grid(resolve_grid(file, options));
  return std::visit(Overloaded{
                        [&](const UncodedFile& f) { return uncoded_curve(f, grid, options); },
                        [&](const CodedFile& f) { return coded_curve(f, options); },
                        [&](const MimoFile& f) { return mimo_curve(f, grid, options); },
                        [](const MultiLegacyFile&) -> std::string {
                          throw InputError("rate-curve does not apply to multilegacy scenarios");
                        },
                    },
                    file.body);
}

std::string prelog_mesh_csv(const ScenarioFile& file, const Options& options) {
  const auto* f = std::get_if<UncodedFile>(&file.body);
  if (!f) throw InputError("prelog-mesh applies to uncoded scenarios only");
  if (!f->mesh) throw InputError("prelog-mesh needs a 'mesh' entry");
  const GridPtr grid = make_grid(resolve_grid(file, options));
  const Spectrum phi_s = f->legacy_psd.build(grid, f->sigma2_s);
  const Spectrum phi_n = f->noise_psd.build(grid, f->sigma2_n);
  const double var_s = mean_power(phi_s);
  const double var_n = mean_power(phi_n);
  if (!(var_s > 0.0) || !(var_n > 0.0)) throw InputError("prelog-mesh needs positive legacy and noise powers");

  const auto& mesh = *f->mesh;
  const std::size_t cols = mesh.snr_db.size();
  const auto prelogs = parallel_map<double>(mesh.d_ratio.size() * cols, options.threads, [&](std::size_t k) {
    const double d = mesh.d_ratio[k / cols];
    const double snr = db_to_linear(mesh.snr_db[k % cols]);
    const UncodedScenario cell{snr * var_n / var_s, phi_s, phi_n, d * var_s, 1.0};
    return onoff_prelog(cell).prelog;
  });
  std::string out = "d_ratio,snr_db,prelog\n";
  for (std::size_t k = 0; k < prelogs.size(); ++k) {
    out += format_number(mesh.d_ratio[k / cols]) + "," + format_number(mesh.snr_db[k % cols]) + "," +
           format_number(prelogs[k]) + "\n";
  }
  return out;
}

json solve_json(const ScenarioFile& file, const Options& options) {
  const GridPtr grid = make_grid(resolve_grid(file, options));
  json out = std::visit(Overloaded{
                            [&](const UncodedFile& f) { return solve_uncoded(f, grid, options); },
                            [&](const MultiLegacyFile& f) { return solve_multilegacy(f, grid); },
                            [&](const CodedFile& f) { return solve_coded_file(f, options); },
                            [&](const MimoFile& f) { return solve_mimo_file(f, grid, options); },
                        },
                        file.body);
  out["log_base"] = options.log_base == LogBase::Bits ? "2" : "e";
  out["grid_points"] = grid->size();
  return out;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw InputError("failed while writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectrum shaping for a cognitive link next to a legacy service"};
  app.require_subcommand(1);
  app.fallthrough();

  std::size_t grid = 0;
  std::string log_base = "e";
  bool quiet = false;
  auto* grid_opt = app.add_option("--grid", grid, "Frequency grid points on [0, pi] (default 4096)");
  app.add_option("--log-base", log_base, "Logarithm base for rates: e or 2")->check(CLI::IsMember({"e", "2"}));
  app.add_flag("--quiet", quiet, "Suppress progress messages");

  std::string input;
  std::string output;
  const auto add_command = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("file", input, "Scenario JSON file")->required();
    sub->add_option("-o,--output", output, "Output path")->required();
    return sub;
  };
  auto* curve_cmd = add_command("rate-curve", "Cognitive rate versus power budget (CSV)");
  auto* mesh_cmd = add_command("prelog-mesh", "High-power prelog over a parameter mesh (CSV)");
  auto* solve_cmd = add_command("solve", "Optimal PSD at a single operating point (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    Options options;
    options.log_base = parse_log_base(log_base);
    options.quiet = quiet;
    if (grid_opt->count() > 0) options.grid_points = grid;
    const ScenarioFile file = load_scenario(input, options.log_base);

    std::string content;
    if (curve_cmd->parsed()) {
      content = rate_curve_csv(file, options);
    } else if (mesh_cmd->parsed()) {
      content = prelog_mesh_csv(file, options);
    } else if (solve_cmd->parsed()) {
      content = solve_json(file, options).dump(2) + "\n";
    }
    write_atomically(output, content);
    if (!options.quiet) err << "wrote " << output << "\n";
    return kOk;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::out_of_range& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace specshape::cli
