#include "gema/expfam_io.hpp"

#include <fstream>

namespace gema::expfam {

namespace {

std::vector<double> numbers(const nlohmann::json& a, const char* field) {
    if (!a.is_array()) throw ParseError(std::string(field) + " must be an array");
    std::vector<double> out;
    for (const auto& v : a) {
        if (!v.is_number()) throw ParseError(std::string(field) + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

ExponentialFamily family_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
        throw ParseError("family descriptor needs a string field \"kind\"");
    }
    const std::string kind = doc["kind"].get<std::string>();
    if (kind == "categorical") {
        if (!doc.contains("atoms") || !doc["atoms"].is_number_unsigned()) {
            throw ParseError("categorical family needs a positive integer \"atoms\"");
        }
        ExponentialFamily fam = categorical(doc["atoms"].get<std::size_t>());
        if (doc.value("gauge_fixed", false)) fam = gauge_fixed(fam);
        return fam;
    }
    if (kind == "finite") {
        if (!doc.contains("statistics") || !doc["statistics"].is_array() || doc["statistics"].empty()) {
            throw ParseError("finite family needs a nonempty \"statistics\" table");
        }
        const auto& table = doc["statistics"];
        const std::size_t atoms = table.size();
        std::size_t m = 0;
        Eigen::MatrixXd stats;
        for (std::size_t i = 0; i < atoms; ++i) {
            const auto row = numbers(table[i], "statistics row");
            if (i == 0) {
                m = row.size();
                stats.resize(static_cast<Eigen::Index>(atoms), static_cast<Eigen::Index>(m));
            } else if (row.size() != m) {
                throw ParseError("statistics rows differ in length");
            }
            for (std::size_t j = 0; j < m; ++j)
                stats(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        }
        auto w = doc.contains("weights") ? numbers(doc["weights"], "weights") : std::vector<double>(atoms, 1.0);
        auto c = doc.contains("carrier") ? numbers(doc["carrier"], "carrier") : std::vector<double>(atoms, 0.0);
        return finite_family(std::move(w), std::move(c), std::move(stats));
    }
    throw ParseError("unknown family kind \"" + kind + "\"");
}

nlohmann::ordered_json family_to_json(const ExponentialFamily& fam) {
    nlohmann::ordered_json out;
    if (fam.space == SampleSpace::Categorical) {
        out["kind"] = "categorical";
        out["atoms"] = fam.size();
        out["gauge_fixed"] = fam.gauge_fixed;
        return out;
    }
    out["kind"] = fam.space == SampleSpace::Finite ? "finite" : "quadrature";
    out["weights"] = fam.base_weights;
    out["carrier"] = fam.carrier;
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < fam.statistics.rows(); ++i) {
        std::vector<double> r;
        for (Eigen::Index j = 0; j < fam.statistics.cols(); ++j) r.push_back(fam.statistics(i, j));
        rows.push_back(r);
    }
    out["statistics"] = rows;
    return out;
}

ExponentialFamily load_family(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return family_from_json(doc);
}

}  // namespace gema::expfam
