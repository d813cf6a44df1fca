#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ttcone/tangent_cone.hpp"

namespace ttcone {

/// Decimal form with 17 significant digits; round-trips IEEE doubles exactly.
inline std::string format_double17(double x) {
    if (!std::isfinite(x)) throw FormatError("cannot serialize a non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

namespace detail {

inline void append_dims(std::string& out, const Dims& dims) {
    out += '[';
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(dims[i]);
    }
    out += ']';
}

inline void append_data(std::string& out, const std::vector<double>& data) {
    out += '[';
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (i) out += ',';
        out += format_double17(data[i]);
    }
    out += ']';
}

inline void append_tensor(std::string& out, const DenseTensor& t) {
    out += "{\"dims\":";
    append_dims(out, t.dims());
    out += ",\"data\":";
    append_data(out, t.data());
    out += '}';
}

inline void append_tensor_list(std::string& out, const std::vector<DenseTensor>& list) {
    out += '[';
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ',';
        append_tensor(out, list[i]);
    }
    out += ']';
}

inline void append_tt(std::string& out, const TTTensor& tt) {
    out += "{\"cores\":";
    append_tensor_list(out, tt.cores());
    out += ",\"flag\":\"";
    out += tt.flag() == Orthogonality::left ? "left" : "none";
    out += "\"}";
}

} // namespace detail

inline std::string to_json(const DenseTensor& t) {
    std::string out;
    detail::append_tensor(out, t);
    out += '\n';
    return out;
}

inline std::string to_json(const TTTensor& tt) {
    std::string out;
    detail::append_tt(out, tt);
    out += '\n';
    return out;
}

inline std::string to_json(const TangentConeVector& v) {
    std::string out = "{\"base\":";
    detail::append_tt(out, v.base);
    out += ",\"slack\":";
    detail::append_dims(out, v.slack);
    out += ",\"blocks\":{\"X\":";
    detail::append_tensor_list(out, v.X);
    out += ",\"U\":";
    detail::append_tensor_list(out, v.U);
    out += ",\"V\":";
    detail::append_tensor_list(out, v.V);
    out += ",\"Z\":";
    detail::append_tensor_list(out, v.Z);
    out += "}}\n";
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw FormatError("cannot read " + path);
    return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out << contents;
    if (!out.good()) throw FormatError("cannot write " + path);
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& where) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw FormatError(where + ": malformed JSON");
    return j;
}

inline DenseTensor dense_from_json(const nlohmann::json& j, const std::string& where) {
    try {
        if (!j.is_object() || !j.contains("dims") || !j.contains("data"))
            throw FormatError(where + ": expected an object with dims and data");
        Dims dims;
        for (const auto& item : j.at("dims")) dims.push_back(item.get<Index>());
        std::vector<double> data;
        for (const auto& item : j.at("data")) data.push_back(item.get<double>());
        return DenseTensor(std::move(dims), std::move(data));
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(where + ": " + e.what());
    }
}

inline TTTensor tt_from_json(const nlohmann::json& j, const std::string& where) {
    try {
        if (!j.is_object() || !j.contains("cores") || !j.contains("flag"))
            throw FormatError(where + ": expected an object with cores and flag");
        std::vector<DenseTensor> cores;
        Index i = 0;
        for (const auto& item : j.at("cores"))
            cores.push_back(dense_from_json(item, where + ", core " + std::to_string(++i)));
        const std::string flag = j.at("flag").get<std::string>();
        if (flag != "left" && flag != "none")
            throw FormatError(where + ": flag must be \"left\" or \"none\"");
        TTTensor tt(std::move(cores), flag == "left" ? Orthogonality::left : Orthogonality::none);
        if (flag == "left" && left_orthogonality_residual(tt) > 1e-8)
            throw FormatError(where + ": flagged left-orthogonal but the cores are not");
        return tt;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(where + ": " + e.what());
    }
}

inline TangentConeVector cone_vector_from_json(const nlohmann::json& j, const std::string& where) {
    try {
        if (!j.is_object() || !j.contains("base") || !j.contains("slack") || !j.contains("blocks"))
            throw FormatError(where + ": expected an object with base, slack and blocks");
        TangentConeVector v;
        v.base = tt_from_json(j.at("base"), where + ", base");
        if (v.base.flag() != Orthogonality::left)
            throw FormatError(where + ": cone vector base must be left-orthogonal");
        for (const auto& item : j.at("slack")) v.slack.push_back(item.get<Index>());
        const auto& blocks = j.at("blocks");
        auto read_list = [&](const char* key, std::vector<DenseTensor>& out) {
            Index i = 0;
            for (const auto& item : blocks.at(key))
                out.push_back(dense_from_json(item, where + ", block " + key + std::to_string(++i)));
        };
        read_list("X", v.X);
        read_list("U", v.U);
        read_list("V", v.V);
        read_list("Z", v.Z);
        v.effective_slack.reserve(v.U.size());
        for (const auto& u : v.U) v.effective_slack.push_back(u.dims().back());
        v.validate();
        return v;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(where + ": " + e.what());
    }
}

inline DenseTensor read_dense_tensor_file(const std::string& path) {
    return dense_from_json(parse_json_text(read_text_file(path), path), path);
}

inline TTTensor read_tt_tensor_file(const std::string& path) {
    return tt_from_json(parse_json_text(read_text_file(path), path), path);
}

inline TangentConeVector read_cone_vector_file(const std::string& path) {
    return cone_vector_from_json(parse_json_text(read_text_file(path), path), path);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x00000100000001b3ull;
    }
    return hash;
}

inline std::string digest_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string(buf);
}

} // namespace ttcone
