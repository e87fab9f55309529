// qhom: command-line front end for the quantum-homology library.
//
// Subcommands
//   product EXPR     evaluate a class expression over the chosen preset
//   semisimple       factor the middle subalgebra's structure polynomial
//   quasimorphism    valuation slopes of loop powers, per field component
//   verify-paper     run the full acceptance battery
//
// Exit codes: 0 success; 2 input error (flag/expression parsing, preset
// mismatch, out-of-range parameters); 3 quasimorphism slope not stabilized
// (partial data still printed); 1 internal error or battery failure.
//
// Output is UTF-8, newline-terminated, and byte-identical across identical
// invocations. Every number is an exact-rational string; no floating-point
// literal ever appears.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qhom/error.hpp"
#include "qhom/expr.hpp"
#include "qhom/json_io.hpp"
#include "qhom/quantum.hpp"
#include "qhom/seidel.hpp"
#include "qhom/subalgebra.hpp"
#include "qhom/verify.hpp"

namespace {

using nlohmann::json;

struct CliConfig {
  std::string manifold = "s2xs2";
  std::string lambda_text = "2";
  std::string mu_text;
  std::int64_t series_floor = -64;
  std::string energy_floor_text;
  int window = 10;
  std::string format = "text";
  std::string volume_convention = "all";
};

// Exit-code contract: parsing and configuration problems are exit 2,
// everything else the library throws is an internal failure (exit 1).
int exit_code_for(const qhom::Error& e) {
  switch (e.kind()) {
    case qhom::ErrorKind::ParseError:
    case qhom::ErrorKind::InvalidArgument:
    case qhom::ErrorKind::PresetMismatch:
      return 2;
    default:
      return 1;
  }
}

qhom::ManifoldPreset preset_from(const CliConfig& cfg, bool lambda_given, bool mu_given) {
  if (cfg.manifold == "s2xs2") {
    if (mu_given) {
      qhom::fail(qhom::ErrorKind::InvalidArgument,
                 "--mu applies to --manifold blowup, not s2xs2");
    }
    return qhom::ManifoldPreset::sphere_product(qhom::rat_parse(cfg.lambda_text));
  }
  if (cfg.manifold == "blowup") {
    if (lambda_given) {
      qhom::fail(qhom::ErrorKind::InvalidArgument,
                 "--lambda applies to --manifold s2xs2, not blowup");
    }
    if (!mu_given) {
      qhom::fail(qhom::ErrorKind::InvalidArgument,
                 "--manifold blowup needs --mu (exact rational in (0,1), mu != 1/3)");
    }
    return qhom::ManifoldPreset::blow_up(qhom::rat_parse(cfg.mu_text));
  }
  qhom::fail(qhom::ErrorKind::InvalidArgument,
             "unknown manifold \"" + cfg.manifold + "\" (expected s2xs2 or blowup)");
}

void emit(const std::string& text) {
  std::fputs(text.c_str(), stdout);
  if (text.empty() || text.back() != '\n') std::fputc('\n', stdout);
}

// ---------------------------------------------------------------------------
// product
// ---------------------------------------------------------------------------

int cmd_product(const CliConfig& cfg, const qhom::ManifoldPreset& p, const std::string& expr) {
  const qhom::Algebra alg(p);
  const qhom::QuantumClass result = qhom::eval_expression(alg, expr);
  if (cfg.format == "json") {
    json j;
    j["expression"] = expr;
    j["preset"] = qhom::preset_to_json(p);
    j["result"] = qhom::class_to_json(p, result);
    emit(qhom::dump_deterministic(j));
  } else {
    emit(qhom::to_string(p, result));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// semisimple
// ---------------------------------------------------------------------------

std::string verdict_label(const qhom::FactorizationCertificate& cert) {
  std::string label = qhom::to_string(cert.verdict);
  if (cert.verdict == qhom::SplitVerdict::SemisimpleSplit) {
    label += "(" + std::to_string(cert.factors.size()) + ")";
  }
  return label;
}

int cmd_semisimple(const CliConfig& cfg, const qhom::ManifoldPreset& p) {
  const qhom::FactorizationCertificate cert = qhom::split_fields(p, cfg.series_floor);
  if (cfg.format == "json") {
    json j;
    j["preset"] = qhom::preset_to_json(p);
    j["certificate"] = qhom::certificate_to_json(cert);
    j["verdict"] = verdict_label(cert);
    emit(qhom::dump_deterministic(j));
    return 0;
  }
  std::string out = verdict_label(cert);
  out += "\nprecision floor: " + std::to_string(cert.precision_floor) + "\n";
  for (std::size_t i = 0; i < cert.factors.size(); ++i) {
    const qhom::CertifiedFactor& f = cert.factors[i];
    out += "factor " + std::to_string(i) + ": degree " +
           std::to_string(qhom::effective_degree(f.poly)) + ", multiplicity " +
           std::to_string(f.multiplicity) + ", reason " + qhom::to_string(f.reason);
    if (f.newton_denominator > 0) {
      out += ", newton denominator " + std::to_string(f.newton_denominator);
    }
    out += "\n";
  }
  emit(out);
  return 0;
}

// ---------------------------------------------------------------------------
// quasimorphism
// ---------------------------------------------------------------------------

const char* match_label(qhom::FormulaMatch m) {
  switch (m) {
    case qhom::FormulaMatch::Match:
      return "MATCH";
    case qhom::FormulaMatch::Mismatch:
      return "MISMATCH";
    case qhom::FormulaMatch::Undetermined:
      return "UNDETERMINED";
  }
  return "UNDETERMINED";
}

bool convention_selected(const CliConfig& cfg, const std::string& name) {
  return cfg.volume_convention == "all" || cfg.volume_convention == name;
}

std::string quasimorphism_text(const CliConfig& cfg, const qhom::QuasimorphismReport& rep) {
  std::string out;
  const bool sphere = rep.preset.kind() == qhom::PresetKind::SphereProduct;
  out += std::string("preset: ") + (sphere ? "s2xs2 lambda=" : "blowup mu=") +
         qhom::rat_str(rep.preset.parameter()) + "\n";
  out += "k_max: " + std::to_string(rep.k_max) + ", window: " + std::to_string(rep.window) + "\n";
  out += std::string("stabilized: ") + (rep.stabilized ? "yes" : "no") + "\n";
  out += "sign: " + rep.sign + "\n";
  for (const qhom::ComponentReport& c : rep.components) {
    out += "component " + std::to_string(c.component) + ": slope ";
    out += c.seq.stabilized_slope ? qhom::rat_str(*c.seq.stabilized_slope) : "UNSTABILIZED";
    out += " (" + c.sign + ")";
    if (c.seq.detected_period > 0) {
      out += ", stride " + std::to_string(c.seq.detected_period);
    }
    out += "\n";
    for (const qhom::FormulaComparison& cmp : c.comparisons) {
      out += "  " + cmp.source + ": expected " + qhom::rat_str(cmp.expected) + ", computed ";
      out += cmp.computed ? qhom::rat_str(*cmp.computed) : "(none)";
      out += std::string(" -> ") + match_label(cmp.verdict) + "\n";
    }
  }
  if (convention_selected(cfg, "omega_n")) {
    out += "volume[omega_n]: " + qhom::rat_str(rep.volume_omega_n) + "\n";
  }
  if (convention_selected(cfg, "omega_n_factorial")) {
    out += "volume[omega_n_factorial]: " + qhom::rat_str(rep.volume_omega_n_factorial) + "\n";
  }
  if (cfg.volume_convention == "all" && rep.paper_matching_volume) {
    out += "volume[paper-matching]: " + qhom::rat_str(*rep.paper_matching_volume) + "\n";
  }
  for (const auto& [name, value] : rep.r_tilde) {
    const bool standard = name == "omega_n" || name == "omega_n_factorial";
    if (standard ? convention_selected(cfg, name) : cfg.volume_convention == "all") {
      out += "r_tilde[" + name + "]: " + qhom::rat_str(value) + "\n";
    }
  }
  return out;
}

json quasimorphism_filtered_json(const CliConfig& cfg, const qhom::QuasimorphismReport& rep) {
  json j = qhom::quasimorphism_to_json(rep);
  if (cfg.volume_convention == "all") return j;
  json volume = json::object();
  volume[cfg.volume_convention] = j["volume"][cfg.volume_convention];
  j["volume"] = std::move(volume);
  json r_tilde = json::object();
  if (j["r_tilde_by_convention"].contains(cfg.volume_convention)) {
    r_tilde[cfg.volume_convention] = j["r_tilde_by_convention"][cfg.volume_convention];
  }
  j["r_tilde_by_convention"] = std::move(r_tilde);
  return j;
}

int cmd_quasimorphism(const CliConfig& cfg, const qhom::ManifoldPreset& p, int k_max,
                      bool energy_floor_given) {
  std::optional<qhom::Rational> energy_floor;
  if (energy_floor_given) energy_floor = qhom::rat_parse(cfg.energy_floor_text);
  const qhom::QuasimorphismReport rep =
      qhom::quasimorphism_restriction(p, k_max, cfg.window, energy_floor);
  if (cfg.format == "json") {
    emit(qhom::dump_deterministic(quasimorphism_filtered_json(cfg, rep)));
  } else {
    emit(quasimorphism_text(cfg, rep));
  }
  return rep.stabilized ? 0 : 3;
}

// ---------------------------------------------------------------------------
// verify-paper
// ---------------------------------------------------------------------------

int cmd_verify_paper(const CliConfig& cfg, bool negative_control) {
  const qhom::BatteryReport report = qhom::run_battery(negative_control);
  if (cfg.format == "json") {
    emit(qhom::dump_deterministic(qhom::battery_to_json(report)));
  } else {
    emit(qhom::battery_text(report));
  }
  return report.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact quantum homology of the sphere product and the one-point blow-up"};
  app.require_subcommand(1);
  app.fallthrough();

  CliConfig cfg;
  auto* manifold_opt = app.add_option("--manifold", cfg.manifold, "Preset: s2xs2 or blowup")
                           ->check(CLI::IsMember({"s2xs2", "blowup"}));
  auto* lambda_opt =
      app.add_option("--lambda", cfg.lambda_text,
                     "Sphere-product area ratio as an exact rational > 1 (default 2)");
  auto* mu_opt = app.add_option(
      "--mu", cfg.mu_text, "Blow-up weight as an exact rational in (0,1), mu != 1/3");
  app.add_option("--series-floor", cfg.series_floor,
                 "Working series depth (powers of the splitting variable)")
      ->capture_default_str();
  auto* energy_floor_opt =
      app.add_option("--energy-floor", cfg.energy_floor_text,
                     "Energy floor seeding loop-power computations (exact rational; "
                     "default chosen per preset)");
  app.add_option("--window", cfg.window, "Slope stabilization window")->capture_default_str();
  app.add_option("--format", cfg.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--volume-convention", cfg.volume_convention,
                 "Which normalized-volume convention to report")
      ->capture_default_str()
      ->check(CLI::IsMember({"omega_n", "omega_n_factorial", "all"}));

  auto* product = app.add_subcommand("product", "Evaluate a quantum-class expression");
  std::string expr;
  product->add_option("expr", expr, "Expression over named classes, e.g. \"A*B\"")->required();

  auto* semisimple =
      app.add_subcommand("semisimple", "Certify the middle subalgebra's field splitting");

  auto* quasimorphism = app.add_subcommand(
      "quasimorphism", "Valuation slope of loop powers and published-constant comparison");
  int k_max = 40;
  quasimorphism->add_option("--k-max", k_max, "Largest loop power in the sequence")
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify-paper", "Run the full acceptance battery");
  bool negative_control = false;
  verify->add_flag("--negative-control", negative_control,
                   "Corrupt one structure constant and require the battery to notice");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) {
      if (manifold_opt->count() || lambda_opt->count() || mu_opt->count()) {
        qhom::fail(qhom::ErrorKind::InvalidArgument,
                   "verify-paper runs every preset; it takes no preset flags");
      }
      return cmd_verify_paper(cfg, negative_control);
    }
    const qhom::ManifoldPreset p =
        preset_from(cfg, lambda_opt->count() > 0, mu_opt->count() > 0);
    if (*product) return cmd_product(cfg, p, expr);
    if (*semisimple) return cmd_semisimple(cfg, p);
    if (*quasimorphism) return cmd_quasimorphism(cfg, p, k_max, energy_floor_opt->count() > 0);
  } catch (const qhom::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 2;
}
