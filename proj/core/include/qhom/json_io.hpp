#pragma once

// JSON views of the library's values. All numbers are exact-rational strings;
// serialization is deterministic (alphabetically ordered keys, fixed layout).

#include <string>

#include <json.hpp>

#include "qhom/quantum.hpp"
#include "qhom/seidel.hpp"
#include "qhom/subalgebra.hpp"

namespace qhom {

nlohmann::json preset_to_json(const ManifoldPreset& p);

// {"terms":[{"class":"E","exp":{"e1":"-1/2","e2":"3/4"},"coeff":"1"}],
//  "energy_floor":"-20" | null}
nlohmann::json class_to_json(const ManifoldPreset& p, const QuantumClass& a);
QuantumClass class_from_json(const ManifoldPreset& p, const nlohmann::json& j);

nlohmann::json certificate_to_json(const FactorizationCertificate& c);

nlohmann::json val_sequence_to_json(const ValSequence& s);
nlohmann::json quasimorphism_to_json(const QuasimorphismReport& r);

// Canonical textual dump: 2-space indentation, trailing newline.
std::string dump_deterministic(const nlohmann::json& j);

}  // namespace qhom
