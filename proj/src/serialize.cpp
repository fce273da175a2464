#include "pdc/serialize.hpp"

#include "pdc/errors.hpp"

namespace pdc {

nlohmann::ordered_json matrix_to_json(const DenseMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

DenseMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ConfigError("matrix: expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw ConfigError("matrix: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

nlohmann::ordered_json signal_to_json(const Signal& s) {
    nlohmann::ordered_json j;
    switch (s.kind()) {
        case Signal::Kind::Constant:
            j["type"] = "constant";
            j["value"] = s.params()[0];
            break;
        case Signal::Kind::Ramp:
            j["type"] = "ramp";
            j["offset"] = s.params()[0];
            j["slope"] = s.params()[1];
            break;
        case Signal::Kind::Sinusoid:
            j["type"] = "sinusoid";
            j["amplitude"] = s.params()[0];
            j["omega"] = s.params()[1];
            j["phase"] = s.params()[2];
            break;
        case Signal::Kind::Tabulated:
            j["type"] = "tabulated";
            j["times"] = s.knot_times();
            j["values"] = s.knot_values();
            break;
    }
    return j;
}

Signal signal_from_json(const nlohmann::json& j) {
    const std::string type = j.value("type", "");
    if (type == "constant") return Signal::constant(j.at("value").get<double>());
    if (type == "ramp")
        return Signal::ramp(j.at("offset").get<double>(), j.at("slope").get<double>());
    if (type == "sinusoid")
        return Signal::sinusoid(j.at("amplitude").get<double>(), j.at("omega").get<double>(),
                                j.value("phase", 0.0));
    if (type == "tabulated")
        return Signal::tabulated(j.at("times").get<std::vector<double>>(),
                                 j.at("values").get<std::vector<double>>());
    throw ConfigError("signal: unknown type '" + type + "'");
}

nlohmann::ordered_json vector_signal_to_json(const VectorSignal& s) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& component : s.components()) arr.push_back(signal_to_json(component));
    return arr;
}

VectorSignal vector_signal_from_json(const nlohmann::json& j, std::size_t expected_dim) {
    if (!j.is_array()) throw ConfigError("vector signal: expected an array of signals");
    std::vector<Signal> comps;
    comps.reserve(j.size());
    for (const auto& item : j) comps.push_back(signal_from_json(item));
    if (comps.size() != expected_dim)
        throw ConfigError("vector signal: expected " + std::to_string(expected_dim) +
                          " components, got " + std::to_string(comps.size()));
    return VectorSignal(std::move(comps));
}

nlohmann::ordered_json certificate_to_json(const ContractionCertificate& cert) {
    nlohmann::ordered_json j;
    j["alpha"] = cert.alpha;
    j["alpha_max"] = cert.alpha_max;
    j["beta"] = cert.beta;
    j["theta"] = matrix_to_json(cert.theta);
    j["q_form"] = matrix_to_json(cert.q_form);
    return j;
}

}  // namespace pdc
