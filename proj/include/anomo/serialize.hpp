#pragma once

// JSON encodings of the domain types. Doubles are written with round-trip
// precision, so decode(encode(x)) reproduces x exactly.

#include <nlohmann/json.hpp>

#include "anomo/types.hpp"

namespace anomo::io {

using json = nlohmann::json;

json to_json(const Matrix& m);
json to_json(const Vector& v);
json to_json(const Mask& m);
json to_json(const RoutingMatrix& r);
json to_json(const CpModel& m);
json to_json(const RlsCaches& c);
json to_json(const Hyperparams& hp);
json to_json(const AnomalyVector& a);
json to_json(const AnomalyEvent& e);

Matrix matrix_from_json(const json& j);
Vector vector_from_json(const json& j);
Mask mask_from_json(const json& j);
RoutingMatrix routing_from_json(const json& j);
CpModel model_from_json(const json& j);
RlsCaches caches_from_json(const json& j);
/// Missing keys keep their defaults; unknown keys raise ParseError.
Hyperparams hyperparams_from_json(const json& j);
AnomalyVector anomaly_from_json(const json& j);
AnomalyEvent event_from_json(const json& j);

}  // namespace anomo::io
