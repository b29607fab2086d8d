#include "gema/kvn_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gema::kvn {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json parse_json(const std::string& text, const std::string& where) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
}

double number(const nlohmann::json& v, const char* what) {
    if (!v.is_number()) throw ParseError(std::string(what) + " must be a number");
    return v.get<double>();
}

Eigen::MatrixXd table(const nlohmann::json& rows, const char* what) {
    if (!rows.is_array()) throw ParseError(std::string(what) + " must be an array of rows");
    Eigen::MatrixXd m;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!r.is_array()) throw ParseError(std::string(what) + " rows must be arrays");
        if (i == 0) m.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(r.size()));
        if (static_cast<Eigen::Index>(r.size()) != m.cols()) throw ParseError(std::string(what) + " rows differ in length");
        for (std::size_t j = 0; j < r.size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = number(r[j], what);
    }
    return m;
}

bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

WaveFunction wavefunction_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("wavefunction must be a JSON object");
    for (const char* key : {"cell_volume", "points", "values"})
        if (!doc.contains(key)) throw ParseError(std::string("wavefunction is missing \"") + key + "\"");
    WaveFunction psi;
    psi.cell_volume = number(doc["cell_volume"], "cell_volume");
    psi.points = table(doc["points"], "points");
    const Eigen::MatrixXd v = table(doc["values"], "values");
    if (v.rows() > 0 && v.cols() != 2) throw ParseError("values must be [re, im] pairs");
    for (Eigen::Index i = 0; i < v.rows(); ++i) psi.values.emplace_back(v(i, 0), v(i, 1));
    validate(psi);
    return psi;
}

nlohmann::ordered_json wavefunction_to_json(const WaveFunction& psi) {
    nlohmann::ordered_json out;
    out["cell_volume"] = psi.cell_volume;
    auto points = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < psi.points.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index j = 0; j < psi.points.cols(); ++j) row.push_back(psi.points(i, j));
        points.push_back(row);
    }
    out["points"] = points;
    auto values = nlohmann::ordered_json::array();
    for (const Complex& v : psi.values) values.push_back({v.real(), v.imag()});
    out["values"] = values;
    return out;
}

WaveFunction wavefunction_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        bool numeric = true;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const std::string_view field(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
            double v = 0.0;
            if (!parse_double(field, v)) numeric = false;
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!numeric) {
            if (rows.empty() && lineno == 1) continue;  // header
            throw ParseError("line " + std::to_string(lineno) + ": non-numeric field");
        }
        if (row.size() < 4) throw ParseError("line " + std::to_string(lineno) + ": need coordinates, re, im, cell_volume");
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("line " + std::to_string(lineno) + ": inconsistent column count");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no data rows");

    const std::size_t k = rows.front().size() - 3;
    WaveFunction psi;
    psi.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
    psi.cell_volume = rows.front().back();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        for (std::size_t a = 0; a < k; ++a) psi.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = r[a];
        psi.values.emplace_back(r[k], r[k + 1]);
        if (r[k + 2] != psi.cell_volume) throw ParseError("cells must share one cell_volume");
    }
    validate(psi);
    return psi;
}

std::string wavefunction_to_csv(const WaveFunction& psi) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t a = 0; a < psi.dim(); ++a) os << 'x' << a << ',';
    os << "re,im,cell_volume\n";
    for (std::size_t i = 0; i < psi.size(); ++i) {
        for (std::size_t a = 0; a < psi.dim(); ++a)
            os << psi.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) << ',';
        os << psi.values[i].real() << ',' << psi.values[i].imag() << ',' << psi.cell_volume << '\n';
    }
    return os.str();
}

WaveFunction load_wavefunction(const std::string& path) {
    const std::string text = slurp(path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return wavefunction_from_csv(text);
    return wavefunction_from_json(parse_json(text, path));
}

LGParams params_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("parameters must be a JSON object");
    LGParams p;
    auto read = [&](const char* key, double& field) {
        if (doc.contains(key)) field = number(doc[key], key);
    };
    read("alpha", p.alpha);
    read("beta", p.beta);
    read("mass", p.mass);
    read("charge", p.charge);
    read("F0", p.F0);
    read("grid_spacing", p.grid_spacing);
    read("magnetization_offset", p.magnetization_offset);
    if (doc.contains("vector_potential")) p.vector_potential = table(doc["vector_potential"], "vector_potential");
    p.validate();
    return p;
}

nlohmann::ordered_json params_to_json(const LGParams& p) {
    nlohmann::ordered_json out;
    out["alpha"] = p.alpha;
    out["beta"] = p.beta;
    out["mass"] = p.mass;
    out["charge"] = p.charge;
    out["F0"] = p.F0;
    out["grid_spacing"] = p.grid_spacing;
    out["magnetization_offset"] = p.magnetization_offset;
    if (p.vector_potential.size() != 0) {
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < p.vector_potential.rows(); ++i) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index j = 0; j < p.vector_potential.cols(); ++j) row.push_back(p.vector_potential(i, j));
            rows.push_back(row);
        }
        out["vector_potential"] = rows;
    }
    return out;
}

LGParams load_params(const std::string& path) { return params_from_json(parse_json(slurp(path), path)); }

}  // namespace gema::kvn
