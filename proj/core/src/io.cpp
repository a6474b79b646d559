#include "mudae/io.hpp"

#include "mudae/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mudae {

using nlohmann::json;

namespace {

std::string matrix_json(const Eigen::MatrixXd& m) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i > 0) out += ",";
        out += "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out += ",";
            out += format_double(m(i, j));
        }
        out += "]";
    }
    return out + "]";
}

std::string vector_json(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) out += ",";
        out += format_double(v[i]);
    }
    return out + "]";
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& field, int rows,
                            int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw ParseError("field '" + field + "': expected " + std::to_string(rows) +
                         " rows");
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError("field '" + field + "' row " + std::to_string(i) +
                             ": expected " + std::to_string(cols) + " columns");
        for (int k = 0; k < cols; ++k) {
            const json& cell = row[static_cast<std::size_t>(k)];
            if (!cell.is_number())
                throw ParseError("field '" + field + "' row " + std::to_string(i) +
                                 " col " + std::to_string(k) + ": expected a number");
            m(i, k) = cell.get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from(const json& j, const std::string& field, int size) {
    if (!j.is_array() || static_cast<int>(j.size()) != size)
        throw ParseError("field '" + field + "': expected " + std::to_string(size) +
                         " entries");
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) {
        const json& cell = j[static_cast<std::size_t>(i)];
        if (!cell.is_number())
            throw ParseError("field '" + field + "' entry " + std::to_string(i) +
                             ": expected a number");
        v[i] = cell.get<double>();
    }
    return v;
}

const json& need(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end())
        throw ParseError(std::string("missing field '") + field + "'");
    return *it;
}

Feature feature_from(const json& j) {
    const std::string kind = need(j, "kind").get<std::string>();
    Feature f;
    if (kind == "var") f.kind = FeatureKind::BaseVar;
    else if (kind == "sin") f.kind = FeatureKind::Sin;
    else if (kind == "cos") f.kind = FeatureKind::Cos;
    else throw ParseError("feature kind '" + kind + "' is not one of var/sin/cos");
    f.var = need(j, "var").get<int>();
    return f;
}

std::string feature_json(const Feature& f) {
    const char* kind = f.kind == FeatureKind::BaseVar ? "var"
                       : f.kind == FeatureKind::Sin   ? "sin"
                                                      : "cos";
    return std::string("{\"kind\":\"") + kind + "\",\"var\":" + std::to_string(f.var) + "}";
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("JSON parse error: ") + e.what());
    }
}

std::string aux_blocks_json(const AuxiliaryMatrix& z) {
    return "\"P\":" + matrix_json(z.p) + ",\"R\":" + matrix_json(z.r) +
           ",\"Q\":" + matrix_json(z.q);
}

std::string box_object_json(const BoxSpec& box) {
    std::string out = "{";
    bool first = true;
    for (const auto& [var, iv] : box) {
        if (!first) out += ",";
        first = false;
        out += quoted(std::to_string(var)) + ":[" + format_double(iv.lo) + "," +
               format_double(iv.hi) + "]";
    }
    return out + "}";
}

BoxSpec box_object_from(const json& j) {
    if (!j.is_object())
        throw ParseError("box: expected an object mapping variable index to [lo, hi]");
    BoxSpec box;
    for (auto it = j.begin(); it != j.end(); ++it) {
        int var = 0;
        try {
            var = std::stoi(it.key());
        } catch (...) {
            throw ParseError("box: key '" + it.key() + "' is not a variable index");
        }
        const json& iv = it.value();
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
            throw ParseError("box: entry '" + it.key() + "' must be [lo, hi]");
        box[var] = Interval{iv[0].get<double>(), iv[1].get<double>()};
    }
    return box;
}

std::string complex_csv(std::complex<double> v) {
    return format_double(v.real()) + "," + format_double(v.imag());
}

} // namespace

std::string format_double(double v) {
    if (v == 0.0) return "0"; // canonicalize negative zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string model_to_json(const AffineJacobianModel& model) {
    std::string out = "{\n";
    out += "  \"n\": " + std::to_string(model.n) + ",\n";
    out += "  \"m\": " + std::to_string(model.m) + ",\n";
    out += "  \"names\": [";
    for (std::size_t i = 0; i < model.names.size(); ++i) {
        if (i > 0) out += ",";
        out += quoted(model.names[i]);
    }
    out += "],\n";
    out += "  \"base_point\": " + vector_json(model.base_point) + ",\n";
    out += "  \"lift\": [";
    for (std::size_t k = 0; k < model.terms.size(); ++k) {
        if (k > 0) out += ",";
        out += "{\"factors\":[";
        const auto& factors = model.terms[k].first.factors;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i > 0) out += ",";
            out += feature_json(factors[i]);
        }
        out += "]}";
    }
    out += "],\n";
    out += "  \"J0\": " + matrix_json(model.j0) + ",\n";
    out += "  \"terms\": [";
    for (std::size_t k = 0; k < model.terms.size(); ++k) {
        if (k > 0) out += ",";
        out += "{\"coord\":" + std::to_string(k) +
               ",\"matrix\":" + matrix_json(model.terms[k].second) + "}";
    }
    out += "]";
    if (model.two_bus.has_value()) {
        const TwoBusParams& p = *model.two_bus;
        out += ",\n  \"params\": {";
        out += "\"e_emf\":" + format_double(p.e_emf);
        out += ",\"x_dp\":" + format_double(p.x_dp);
        out += ",\"r_line\":" + format_double(p.r_line);
        out += ",\"x_line\":" + format_double(p.x_line);
        out += ",\"p_load\":" + format_double(p.p_load);
        out += ",\"q_load\":" + format_double(p.q_load);
        out += ",\"p_m\":" + format_double(p.p_m);
        out += ",\"m_inertia\":" + format_double(p.m_inertia);
        out += ",\"d_damp\":" + format_double(p.d_damp);
        out += "}";
    }
    out += "\n}\n";
    return out;
}

AffineJacobianModel model_from_json(const std::string& text) {
    const json j = parse(text);
    AffineJacobianModel model;
    model.n = need(j, "n").get<int>();
    model.m = need(j, "m").get<int>();
    if (model.n < 1 || model.m < 0)
        throw ParseError("model: need n >= 1 and m >= 0");
    const int order = model.n + model.m;

    for (const auto& name : need(j, "names"))
        model.names.push_back(name.get<std::string>());
    model.base_point = vector_from(need(j, "base_point"), "base_point", order);

    std::vector<LiftedCoord> coords;
    for (const auto& entry : need(j, "lift")) {
        LiftedCoord coord;
        for (const auto& fj : need(entry, "factors"))
            coord.factors.push_back(feature_from(fj));
        coords.push_back(std::move(coord));
    }

    model.j0 = matrix_from(need(j, "J0"), "J0", order, order);

    const json& terms = need(j, "terms");
    if (terms.size() != coords.size())
        throw ParseError("model: terms and lift must have the same length");
    std::vector<bool> seen(coords.size(), false);
    model.terms.resize(coords.size());
    for (const auto& entry : terms) {
        const int k = need(entry, "coord").get<int>();
        if (k < 0 || k >= static_cast<int>(coords.size()))
            throw ParseError("model: term coord index out of range");
        if (seen[static_cast<std::size_t>(k)])
            throw ParseError("model: duplicate term for coord " + std::to_string(k));
        seen[static_cast<std::size_t>(k)] = true;
        model.terms[static_cast<std::size_t>(k)] = {
            coords[static_cast<std::size_t>(k)],
            matrix_from(need(entry, "matrix"), "terms.matrix", order, order)};
    }

    if (auto it = j.find("params"); it != j.end()) {
        TwoBusParams p;
        p.e_emf = need(*it, "e_emf").get<double>();
        p.x_dp = need(*it, "x_dp").get<double>();
        p.r_line = need(*it, "r_line").get<double>();
        p.x_line = need(*it, "x_line").get<double>();
        p.p_load = need(*it, "p_load").get<double>();
        p.q_load = need(*it, "q_load").get<double>();
        p.p_m = need(*it, "p_m").get<double>();
        p.m_inertia = need(*it, "m_inertia").get<double>();
        p.d_damp = need(*it, "d_damp").get<double>();
        model.two_bus = p;
    }

    try {
        validate_model(model);
    } catch (const InputError& e) {
        throw ParseError(std::string("model validation: ") + e.what());
    }
    return model;
}

std::string box_to_json(const BoxSpec& box) {
    return "{\"boxes\":" + box_object_json(box) + "}\n";
}

BoxSpec box_from_json(const std::string& text) {
    const json j = parse(text);
    return box_object_from(need(j, "boxes"));
}

std::string certificate_to_json(const Certificate& cert) {
    std::string out = "{";
    out += aux_blocks_json(cert.z);
    out += ",\"zeta\":" + format_double(cert.zeta);
    out += std::string(",\"mode\":") +
           (cert.mode == CertificateMode::AtPoint ? "\"at_point\"" : "\"fixed_z\"");
    out += ",\"point\":" + vector_json(cert.point);
    out += "}\n";
    return out;
}

std::string certified_box_to_json(const CertifiedBox& box,
                                  std::optional<double> alpha) {
    std::string out = "{";
    out += aux_blocks_json(box.z);
    out += ",\"zeta_star\":" + format_double(box.zeta_star);
    if (alpha.has_value()) out += ",\"alpha\":" + format_double(*alpha);
    out += ",\"box\":" + box_object_json(box.physical_box);
    out += ",\"vertex_count\":" + std::to_string(box.vertex_count);
    out += ",\"certified\":" + std::string(box.certified() ? "true" : "false");
    out += "}\n";
    return out;
}

AuxiliaryMatrix aux_matrix_from_json(const std::string& text) {
    const json j = parse(text);
    const json& pj = need(j, "P");
    if (!pj.is_array() || pj.empty())
        throw ParseError("certificate: P must be a non-empty matrix");
    const int n = static_cast<int>(pj.size());
    const json& qj = need(j, "Q");
    const int m = static_cast<int>(qj.size());
    AuxiliaryMatrix z;
    z.p = matrix_from(pj, "P", n, n);
    z.r = matrix_from(need(j, "R"), "R", m, n);
    z.q = matrix_from(qj, "Q", m, m);
    return z;
}

BoxSpec box_from_certificate_json(const std::string& text) {
    const json j = parse(text);
    return box_object_from(need(j, "box"));
}

std::string eigs_csv(const PencilSpectrum& spectrum) {
    std::string out = "re,im,infinite_count\n";
    for (const auto& lambda : spectrum.finite)
        out += complex_csv(lambda) + "," + std::to_string(spectrum.infinite_count) + "\n";
    return out;
}

std::string rootlocus_csv(const std::vector<RootLocusStep>& steps, int n) {
    std::string out = "var";
    for (int i = 1; i <= n; ++i)
        out += ",re_" + std::to_string(i) + ",im_" + std::to_string(i);
    out += ",critical_index,crossing_flag,feasible\n";
    for (const auto& step : steps) {
        out += format_double(step.var_value);
        for (int i = 0; i < n; ++i) {
            if (step.feasible)
                out += "," + complex_csv(step.eigenvalues[static_cast<std::size_t>(i)]);
            else
                out += ",nan,nan";
        }
        out += "," + (step.feasible ? std::to_string(step.critical_index) : "-1");
        out += std::string(",") + (step.crossing ? "1" : "0");
        out += std::string(",") + (step.feasible ? "1" : "0") + "\n";
    }
    return out;
}

std::string sensitivity_csv(const std::vector<SensitivityStep>& steps,
                            const AffineJacobianModel& model,
                            const std::vector<int>& coords, int var) {
    std::string out = "var,coord_name,re_dlambda,im_dlambda\n";
    for (const auto& step : steps) {
        if (!step.feasible) {
            out += format_double(step.var_value) + ",infeasible,nan,nan\n";
            continue;
        }
        for (std::size_t idx = 0; idx < coords.size(); ++idx) {
            out += format_double(step.var_value) + "," +
                   model.coord_name(coords[idx]) + "," +
                   complex_csv(step.dlambda_dz[idx]) + "\n";
        }
        out += format_double(step.var_value) + "," + model.var_name(var) + "," +
               complex_csv(step.dlambda_dvar) + "\n";
    }
    return out;
}

std::string scan_csv(const AffineJacobianModel& model, const ScanResult& scan) {
    auto axis_name = [&](const Axis& axis) {
        if (axis.kind == Axis::Kind::VoltageMagnitude) return std::string("vmag");
        return model.var_name(axis.var);
    };
    std::string out = axis_name(scan.axis1) + "," + axis_name(scan.axis2);
    for (const auto& name : scan.mode_names) out += ",class_" + name;
    out += "\n";
    for (int i1 = 0; i1 < scan.axis1.steps; ++i1) {
        for (int i2 = 0; i2 < scan.axis2.steps; ++i2) {
            const auto& verdicts =
                scan.cells[static_cast<std::size_t>(i1) * scan.axis2.steps + i2];
            out += format_double(scan.axis1.value_at(i1)) + "," +
                   format_double(scan.axis2.value_at(i2));
            for (const auto& verdict : verdicts) out += "," + to_string(verdict);
            out += "\n";
        }
    }
    return out;
}

std::string area_csv(const std::vector<CenterOutcome>& centers) {
    std::string out = "center_id,sigma_critical,ratio_exact,ratio_bmi,feasible\n";
    for (const auto& center : centers) {
        out += std::to_string(center.id) + ",";
        if (center.feasible) {
            out += format_double(center.sigma_critical) + "," +
                   format_double(center.exact.ratio) + "," +
                   format_double(center.bmi.ratio) + ",1\n";
        } else {
            out += "nan,nan,nan,0\n";
        }
    }
    return out;
}

std::string fits_json(const RegressionFit& exact, const RegressionFit& bmi) {
    auto fit_json = [](const RegressionFit& fit) {
        std::string out = "{";
        out += "\"slope\":" + format_double(fit.slope);
        out += ",\"intercept\":" + format_double(fit.intercept);
        out += ",\"r\":" + format_double(fit.r_value);
        out += ",\"degenerate\":" + std::string(fit.degenerate ? "true" : "false");
        return out + "}";
    };
    return "{\"exact\":" + fit_json(exact) + ",\"bmi\":" + fit_json(bmi) + "}\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << content;
    if (!out.good()) throw InputError("write failed: " + path);
}

} // namespace mudae
