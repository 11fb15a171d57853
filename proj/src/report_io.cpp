#include "orlicz/report_io.hpp"

#include "orlicz/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orlicz {
namespace {

constexpr const char* kModule = "cli_harness";

void dump_into(std::string& out, const Json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                dump_into(out, it.value(), indent + 2);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            bool scalars = true;
            for (const auto& e : v) scalars = scalars && !e.is_structured();
            if (scalars) {
                out += "[";
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i) out += ", ";
                    dump_into(out, v[i], indent + 2);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump_into(out, v[i], indent + 2);
            }
            out += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float:
            out += format_double(v.get<double>());
            return;
        default:
            out += v.dump();
            return;
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

Json doubles(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(x);
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json(const Json& value) {
    std::string out;
    dump_into(out, value, 0);
    out += "\n";
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ResourceError(kModule, "cannot write " + path.string());
    os << text;
    if (!os) throw ResourceError(kModule, "write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& value) { write_text(path, dump_json(value)); }

Json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ParseError(kModule, "cannot read " + path.string());
    try {
        return Json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(kModule, path.string() + ": " + e.what());
    }
}

void write_field_csv(const std::filesystem::path& path, const Field& field) {
    std::string text = "node,x,y,value\n";
    const Mesh& mesh = field.mesh();
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
        const auto x = mesh.node(i);
        text += std::to_string(i) + "," + format_double(x[0]) + "," + format_double(x[1]) + "," +
                format_double(field[i]) + "\n";
    }
    write_text(path, text);
}

std::vector<double> read_field_values(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ParseError(kModule, "cannot read field file " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != "node,x,y,value") {
        throw ParseError(kModule, path.string() + ": expected header node,x,y,value");
    }
    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        try {
            if (cells.size() != 4 || std::stoul(cells[0]) != row) throw std::invalid_argument("row");
            values.push_back(std::stod(cells[3]));
        } catch (const std::exception&) {
            throw ParseError(kModule, path.string() + ": malformed row " + std::to_string(row + 2));
        }
        ++row;
    }
    if (values.empty()) throw ParseError(kModule, path.string() + ": no rows");
    return values;
}

void write_plot_csv(const std::filesystem::path& path, const PlotTable& table) {
    std::string text;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) text += ",";
        text += table.columns[c];
    }
    text += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) text += ",";
            text += format_double(row[c]);
        }
        text += "\n";
    }
    write_text(path, text);
}

Json to_json(const ConditionReport& r) {
    return Json{{"phi1", r.phi1},
                {"phi2", r.phi2},
                {"phi3_ratio", r.phi3_ratio},
                {"phi3_dimension", r.phi3_dimension},
                {"phi3", r.phi3},
                {"ratio_min", r.ratio_min},
                {"ratio_max", r.ratio_max},
                {"passes", r.passes}};
}

Json to_json(const IndexEstimate& r) {
    return Json{{"ell_hat", r.ell_hat},
                {"em_hat", r.em_hat},
                {"grid_ell", r.grid_ell},
                {"grid_em", r.grid_em},
                {"closed_form", r.closed_form}};
}

Json to_json(const EquivalenceReport& r) {
    return Json{{"equivalent", r.equivalent}, {"c1", r.c1}, {"c2", r.c2}, {"t0", r.t0}, {"method", r.method}};
}

Json to_json(const NormReport& r) {
    Json lp = Json::object();
    for (const auto& [p, v] : r.lp_values) lp[std::isfinite(p) ? format_double(p) : "inf"] = v;
    return Json{{"modular", r.modular},
                {"luxemburg", r.luxemburg},
                {"grad_luxemburg", r.grad_luxemburg},
                {"lp", lp}};
}

Json to_json(const SolveReport& r) {
    return Json{{"newton_iterations", r.newton_iterations},
                {"continuation_steps", r.continuation_steps},
                {"picard_iterations", r.picard_iterations},
                {"final_energy", r.final_energy},
                {"residual_dual_norm", r.residual_dual_norm},
                {"sup_norm", r.sup_norm},
                {"tol", r.tol},
                {"eps_final", r.eps_final},
                {"converged", r.converged}};
}

Json to_json(const MoserReport& r) {
    return Json{{"branch", r.m_variant ? "em" : "ell"},
                {"exponent", r.exponent},
                {"exponent_star", r.exponent_star},
                {"q_prime", r.q_prime},
                {"delta", r.delta},
                {"beta_1", r.beta_1},
                {"A", r.A},
                {"b", r.b},
                {"d0", r.d0},
                {"d0_truncated", r.d0_truncated},
                {"d0_gap", r.d0_gap},
                {"threshold_T", r.threshold_T},
                {"linf_bound", r.linf_bound},
                {"beta", doubles(r.beta)},
                {"beta_star", doubles(r.beta_star)},
                {"lambda", doubles(r.lambda)},
                {"F", doubles(r.F)},
                {"ratio", doubles(r.ratio)}};
}

Json to_json(const LadderReport& r) {
    return Json{{"s_values", doubles(r.s_values)},
                {"steps_needed", r.steps_needed},
                {"r", r.r},
                {"k_cutoff", r.k_cutoff},
                {"product_bound", r.product_bound}};
}

Json to_json(const CritBound& r) {
    return Json{{"r", r.r},
                {"ell", r.ell},
                {"k_const", r.k_const},
                {"base_norm", r.base_norm},
                {"bound", r.bound},
                {"partial", doubles(r.partial)},
                {"max_tail_gap", r.max_tail_gap}};
}

Json nfunction_json(const NFunction& nf) {
    Json params = Json::object();
    for (const auto& [k, v] : nf.params()) params[k] = v;
    return Json{{"family", std::string(family_id(nf.family()))},
                {"label", nf.label()},
                {"params", params},
                {"dim", nf.dim()},
                {"ell", nf.ell()},
                {"em", nf.em()}};
}

Json mesh_json(const Mesh& mesh) {
    return Json{{"dimension", mesh.dimension()},
                {"nodes", mesh.num_nodes()},
                {"elements", mesh.num_elements()},
                {"measure", mesh.total_measure()},
                {"diameter", mesh.diameter()}};
}

}  // namespace orlicz
