#pragma once

#include <string>

#include "json.hpp"
#include "pdc/contraction.hpp"
#include "pdc/matrix.hpp"
#include "pdc/signal.hpp"

namespace pdc {

nlohmann::ordered_json matrix_to_json(const DenseMatrix& m);
DenseMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::ordered_json signal_to_json(const Signal& s);
Signal signal_from_json(const nlohmann::json& j);

nlohmann::ordered_json vector_signal_to_json(const VectorSignal& s);
VectorSignal vector_signal_from_json(const nlohmann::json& j, std::size_t expected_dim);

/// {alpha, alpha_max, beta, theta, q_form} per the certificate schema.
nlohmann::ordered_json certificate_to_json(const ContractionCertificate& cert);

}  // namespace pdc
