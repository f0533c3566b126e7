#include "relucoll/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relucoll/errors.hpp"
#include "relucoll/rng.hpp"

namespace rc {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "nan") return NAN;
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        double v = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec == std::errc() && r.ptr == s.data() + s.size()) return v;
    }
    throw ConfigError(where + ": expected a number");
}

Json float_array(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(format_double(x));
    return a;
}

std::vector<double> parse_float_array(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_double(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Json weights_to_json(const WeightModel& w) {
    return Json{{"rho_explicit", float_array(w.rho_explicit)},
                {"tail_c", format_double(w.tail_c)},
                {"tail_r", format_double(w.tail_r)},
                {"q", format_double(w.q)},
                {"eta", w.eta},
                {"theta", format_double(w.theta)},
                {"lambda", format_double(w.lambda)}};
}

WeightModel weights_from_json(const Json& j) {
    WeightModel w;
    w.rho_explicit = parse_float_array(j.at("rho_explicit"), "weight_model.rho_explicit");
    w.tail_c = parse_double(j.at("tail_c"), "weight_model.tail_c");
    w.tail_r = parse_double(j.at("tail_r"), "weight_model.tail_r");
    w.q = parse_double(j.at("q"), "weight_model.q");
    w.eta = j.at("eta").get<int>();
    w.theta = parse_double(j.at("theta"), "weight_model.theta");
    w.lambda = parse_double(j.at("lambda"), "weight_model.lambda");
    return w;
}

Json plan_to_json(const CollocationPlan& plan) {
    Json indices = Json::array();
    for (const auto& s : plan.lambda_set) {
        Json e = Json::array();
        for (const auto& [j, v] : s.entries()) e.push_back({j, v});
        indices.push_back(e);
    }
    Json triples = Json::array();
    for (const auto& t : plan.triples)
        triples.push_back({{"s_ref", t.s_ref}, {"e_mask", t.e_mask}, {"k", t.k}, {"sign", t.sign}, {"point_ref", t.point_ref}});
    Json points = Json::array();
    for (const auto& p : plan.points) {
        Json q = Json::array();
        for (const auto& [j, y] : p) q.push_back({j, format_double(y)});
        points.push_back(q);
    }
    return Json{{"xi", format_double(plan.xi)},
                {"weight_model", weights_to_json(plan.weights)},
                {"m1", plan.m1},
                {"m_active", plan.m_active},
                {"indices", indices},
                {"triples", triples},
                {"points", points}};
}

CollocationPlan plan_from_json(const Json& j) {
    try {
        const WeightModel w = weights_from_json(j.at("weight_model"));
        std::vector<MultiIndex> set;
        for (const auto& e : j.at("indices")) {
            std::vector<MultiIndex::Entry> ent;
            for (const auto& p : e) ent.emplace_back(p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>());
            set.emplace_back(std::move(ent));
        }
        CollocationPlan plan = build_plan_from_set(std::move(set), w, parse_double(j.at("xi"), "plan.xi"));
        const auto& tr = j.at("triples");
        if (tr.size() != plan.triples.size() || j.at("points").size() != plan.points.size())
            throw ConfigError("plan file: stored triples do not match the index set");
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const auto& t = plan.triples[i];
            if (tr[i].at("s_ref").get<std::uint32_t>() != t.s_ref || tr[i].at("e_mask").get<std::uint32_t>() != t.e_mask ||
                tr[i].at("k").get<std::vector<int>>() != t.k || tr[i].at("sign").get<int>() != t.sign ||
                tr[i].at("point_ref").get<std::uint32_t>() != t.point_ref)
                throw ConfigError("plan file: triple " + std::to_string(i) + " differs from the rebuilt plan");
        }
        return plan;
    } catch (const Json::exception& ex) {
        throw ConfigError(std::string("plan file: ") + ex.what());
    }
}

Json network_to_json(const ReluNetwork& net) {
    Json layers = Json::array();
    for (const auto& l : net.layers()) {
        Json jl{{"rows", l.rows}, {"cols", l.cols}, {"bias", float_array(l.bias)}};
        if (static_cast<std::size_t>(l.rows) * l.cols <= kDenseLayerLimit) {
            jl["weights"] = float_array(l.dense());
        } else {
            jl["indptr"] = l.row_ptr;
            jl["indices"] = l.col_idx;
            jl["values"] = float_array(l.val);
        }
        layers.push_back(std::move(jl));
    }
    return Json{{"input_dim", net.input_dim()},
                {"layers", layers},
                {"meta", {{"W", net.size()}, {"L", net.depth()}, {"W_unpadded", net.unpadded_size()}, {"label", net.label()}}}};
}

ReluNetwork network_from_json(const Json& j) {
    try {
        std::vector<Layer> layers;
        std::size_t li = 0;
        for (const auto& jl : j.at("layers")) {
            const std::string where = "layers[" + std::to_string(li++) + "]";
            const auto rows = jl.at("rows").get<std::uint32_t>();
            const auto cols = jl.at("cols").get<std::uint32_t>();
            const auto bias = parse_float_array(jl.at("bias"), where + ".bias");
            if (jl.contains("weights")) {
                layers.push_back(Layer::from_dense(rows, cols, parse_float_array(jl.at("weights"), where + ".weights"), bias));
            } else {
                Layer l;
                l.rows = rows;
                l.cols = cols;
                l.row_ptr = jl.at("indptr").get<std::vector<std::uint32_t>>();
                l.col_idx = jl.at("indices").get<std::vector<std::uint32_t>>();
                l.val = parse_float_array(jl.at("values"), where + ".values");
                l.bias = bias;
                layers.push_back(std::move(l));
            }
        }
        ReluNetwork net(j.at("input_dim").get<std::size_t>(), std::move(layers));
        if (j.contains("meta")) {
            const auto& m = j.at("meta");
            if (m.contains("label")) net.set_label(m.at("label").get<std::string>());
            if (m.contains("W_unpadded")) net.set_unpadded_size(m.at("W_unpadded").get<std::size_t>());
            if (m.contains("W") && m.at("W").get<std::size_t>() != net.size())
                throw ConfigError("network file: stored W does not match the recount");
        }
        return net;
    } catch (const Json::exception& ex) {
        throw ConfigError(std::string("network file: ") + ex.what());
    } catch (const DomainError& ex) {
        throw ConfigError(std::string("network file: ") + ex.what());
    }
}

Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto row = m.row(r);
        rows.push_back(float_array(std::vector<double>(row.begin(), row.end())));
    }
    return Json{{"rows", m.rows}, {"cols", m.cols}, {"data", rows}};
}

Mat matrix_from_json(const Json& j, const std::string& where) {
    Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    const auto& data = j.at("data");
    if (data.size() != m.rows) throw ConfigError(where + ": row count mismatch");
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto row = parse_float_array(data[r], where);
        if (row.size() != m.cols) throw ConfigError(where + ": column count mismatch in row " + std::to_string(r));
        std::copy(row.begin(), row.end(), m.row(r).begin());
    }
    return m;
}

std::string json_hash(const Json& j) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << text;
        if (!out) throw ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, p);
}

Json read_json(const std::string& path) {
    try {
        return Json::parse(read_text(path));
    } catch (const Json::parse_error& ex) {
        throw ConfigError(path + ": " + ex.what());
    }
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(1) + "\n"); }

Mat read_csv_matrix(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            double v = 0.0;
            const char* b = cell.data();
            while (*b == ' ') ++b;
            const auto r = std::from_chars(b, cell.data() + cell.size(), v);
            if (r.ec != std::errc()) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (rows.empty() && lineno == 1) continue;  // header
            throw ConfigError(path + ": non-numeric value on line " + std::to_string(lineno));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ConfigError(path + ": inconsistent column count on line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    Mat m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    return m;
}

std::string csv_matrix(const Mat& m, const std::vector<std::string>& header) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    if (!header.empty()) out += "\n";
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) out += (c ? "," : "") + format_double(m(r, c));
        out += "\n";
    }
    return out;
}

}  // namespace rc
