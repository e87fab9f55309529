#include "qhom/json_io.hpp"

#include "qhom/error.hpp"

namespace qhom {

using nlohmann::json;

json preset_to_json(const ManifoldPreset& p) {
  json j;
  if (p.kind() == PresetKind::SphereProduct) {
    j["manifold"] = "s2xs2";
    j["lambda"] = rat_str(p.parameter());
  } else {
    j["manifold"] = "blowup";
    j["mu"] = rat_str(p.parameter());
    j["kappa"] = p.kappa();
  }
  return j;
}

json class_to_json(const ManifoldPreset& p, const QuantumClass& a) {
  json j;
  j["terms"] = json::array();
  for (const auto& [key, coeff] : a.terms()) {
    json t;
    t["class"] = basis_name(p, key.cls);
    // The slot id pins the basis element independently of preset naming.
    t["slot"] = static_cast<int>(key.cls);
    t["exp"] = json{{"e1", rat_str(key.exp.a1)}, {"e2", rat_str(key.exp.a2)}};
    t["coeff"] = rat_str(coeff);
    j["terms"].push_back(std::move(t));
  }
  if (a.energy_floor()) {
    j["energy_floor"] = rat_str(*a.energy_floor());
  } else {
    j["energy_floor"] = nullptr;
  }
  return j;
}

QuantumClass class_from_json(const ManifoldPreset& p, const json& j) {
  QuantumClass out;
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array()) {
    fail(ErrorKind::ParseError, "quantum class JSON must be an object with a terms array");
  }
  for (const json& t : j["terms"]) {
    if (!t.contains("slot") || !t["slot"].is_number_integer()) {
      fail(ErrorKind::ParseError, "term is missing its slot id");
    }
    const int slot = t["slot"].get<int>();
    if (slot < 0 || slot > 3) fail(ErrorKind::ParseError, "slot id out of range");
    const LatticeVector exp{rat_parse(t.at("exp").at("e1").get<std::string>()),
                            rat_parse(t.at("exp").at("e2").get<std::string>())};
    out.add_term(static_cast<BasisId>(slot), exp, rat_parse(t.at("coeff").get<std::string>()));
  }
  if (j.contains("energy_floor") && !j["energy_floor"].is_null()) {
    out.impose_floor(p, rat_parse(j["energy_floor"].get<std::string>()));
  }
  return out;
}

json certificate_to_json(const FactorizationCertificate& c) {
  json j;
  j["verdict"] = to_string(c.verdict);
  j["precision_floor"] = c.precision_floor;
  j["factors"] = json::array();
  for (const CertifiedFactor& f : c.factors) {
    json fj;
    fj["degree"] = effective_degree(f.poly);
    fj["multiplicity"] = f.multiplicity;
    fj["reason"] = to_string(f.reason);
    if (f.newton_denominator > 0) {
      fj["newton_denominator"] = f.newton_denominator;
    } else {
      fj["newton_denominator"] = nullptr;
    }
    fj["coefficients"] = json::array();
    for (int i = 0; i <= f.poly.degree(); ++i) {
      fj["coefficients"].push_back(to_string(f.poly.coeff(i)));
    }
    j["factors"].push_back(std::move(fj));
  }
  return j;
}

json val_sequence_to_json(const ValSequence& s) {
  json j;
  j["entries"] = json::array();
  for (const auto& [k, v] : s.entries) {
    j["entries"].push_back(json{{"k", k}, {"val", rat_str(v)}});
  }
  j["window"] = s.window;
  j["detected_period"] = s.detected_period;
  if (s.stabilized_slope) {
    j["stabilized_slope"] = rat_str(*s.stabilized_slope);
  } else {
    j["stabilized_slope"] = nullptr;
  }
  return j;
}

namespace {

const char* match_str(FormulaMatch m) {
  switch (m) {
    case FormulaMatch::Match:
      return "match";
    case FormulaMatch::Mismatch:
      return "mismatch";
    case FormulaMatch::Undetermined:
      return "undetermined";
  }
  return "undetermined";
}

}  // namespace

json quasimorphism_to_json(const QuasimorphismReport& r) {
  json j;
  j["preset"] = preset_to_json(r.preset);
  j["k_max"] = r.k_max;
  j["window"] = r.window;
  j["stabilized"] = r.stabilized;
  j["sign"] = r.sign;
  if (!r.components.empty() && r.components[0].seq.stabilized_slope) {
    j["slope"] = rat_str(*r.components[0].seq.stabilized_slope);
  } else {
    j["slope"] = nullptr;
  }
  j["slope_formula_matches"] = json::array();
  if (!r.components.empty()) {
    for (const FormulaComparison& c : r.components[0].comparisons) {
      j["slope_formula_matches"].push_back(json{
          {"source", c.source},
          {"expected", rat_str(c.expected)},
          {"match", c.verdict == FormulaMatch::Match},
          {"verdict", match_str(c.verdict)},
      });
    }
  }
  j["components"] = json::array();
  for (const ComponentReport& c : r.components) {
    json cj;
    cj["component"] = c.component;
    cj["sign"] = c.sign;
    cj["sequence"] = val_sequence_to_json(c.seq);
    cj["comparisons"] = json::array();
    for (const FormulaComparison& cmp : c.comparisons) {
      json xj;
      xj["source"] = cmp.source;
      xj["expected"] = rat_str(cmp.expected);
      if (cmp.computed) {
        xj["computed"] = rat_str(*cmp.computed);
      } else {
        xj["computed"] = nullptr;
      }
      xj["verdict"] = match_str(cmp.verdict);
      cj["comparisons"].push_back(std::move(xj));
    }
    j["components"].push_back(std::move(cj));
  }
  j["volume"] = json{{"omega_n", rat_str(r.volume_omega_n)},
                     {"omega_n_factorial", rat_str(r.volume_omega_n_factorial)}};
  if (r.paper_matching_volume) {
    j["volume"]["paper_matching"] = rat_str(*r.paper_matching_volume);
  } else {
    j["volume"]["paper_matching"] = nullptr;
  }
  j["r_tilde_by_convention"] = json::object();
  for (const auto& [name, value] : r.r_tilde) {
    j["r_tilde_by_convention"][name] = rat_str(value);
  }
  return j;
}

std::string dump_deterministic(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qhom
