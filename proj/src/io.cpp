#include "agesis/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include "agesis/errors.hpp"

namespace agesis {

std::string format_value(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw Error("write failed for " + path);
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& tr,
                          const UnitScaling& units) {
    auto out = open_out(path);
    const double tscale = units.original ? units.tau : 1.0;
    const double bscale = units.original ? 1.0 / units.tau : 1.0;
    out << "t,S,P,J,b\n";
    for (size_t i = 0; i < tr.times.size(); ++i) {
        out << format_value(tr.times[i] * tscale) << ',' << format_value(tr.s[i]) << ','
            << format_value(tr.p[i]) << ',' << format_value(tr.j[i]) << ','
            << format_value(tr.b[i] * bscale) << '\n';
    }
    finish(out, path);
}

void write_phase_plane_csv(const std::string& path, const Trajectory& tr) {
    auto out = open_out(path);
    out << "P,S\n";
    for (size_t i = 0; i < tr.times.size(); ++i)
        out << format_value(tr.p[i]) << ',' << format_value(tr.s[i]) << '\n';
    finish(out, path);
}

void write_age_surface_csv(const std::string& path, const AgeSurface& surf,
                           const UnitScaling& units) {
    auto out = open_out(path);
    const double tscale = units.original ? units.tau : 1.0;
    const double iscale = units.original ? 1.0 / units.tau : 1.0;
    out << "t,a,i\n";
    for (size_t ti = 0; ti < surf.times.size(); ++ti)
        for (size_t ai = 0; ai < surf.ages.size(); ++ai)
            out << format_value(surf.times[ti] * tscale) << ','
                << format_value(surf.ages[ai] * tscale) << ','
                << format_value(surf.density[ti][ai] * iscale) << '\n';
    finish(out, path);
}

void write_text_file(const std::string& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
    finish(out, path);
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::string& data_path, const nlohmann::json& manifest) {
    write_text_file(data_path + ".manifest.json", manifest.dump(2) + "\n");
}

namespace {

bool type_matches(const nlohmann::json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
}

void validate_node(const nlohmann::json& doc, const nlohmann::json& schema,
                   const std::string& path, std::vector<SchemaIssue>& issues) {
    if (schema.contains("type")) {
        const auto& ty = schema["type"];
        bool ok = false;
        if (ty.is_string()) {
            ok = type_matches(doc, ty.get<std::string>());
        } else if (ty.is_array()) {
            for (const auto& t : ty)
                if (t.is_string() && type_matches(doc, t.get<std::string>())) ok = true;
        }
        if (!ok) {
            issues.push_back({path, "type mismatch: expected " + ty.dump() + ", got " +
                                        std::string(doc.type_name())});
            return;  // deeper checks would only cascade
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& v : schema["enum"])
            if (v == doc) ok = true;
        if (!ok)
            issues.push_back({path, "value " + doc.dump() + " not in enum " +
                                        schema["enum"].dump()});
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& name : schema["required"])
                if (!doc.contains(name.get<std::string>()))
                    issues.push_back(
                        {path, "missing required member '" + name.get<std::string>() + "'"});
        if (schema.contains("properties"))
            for (auto it = schema["properties"].begin(); it != schema["properties"].end();
                 ++it)
                if (doc.contains(it.key()))
                    validate_node(doc[it.key()], it.value(), path + "/" + it.key(), issues);
    }
    if (doc.is_array() && schema.contains("items")) {
        for (size_t i = 0; i < doc.size(); ++i)
            validate_node(doc[i], schema["items"], path + "/" + std::to_string(i), issues);
    }
}

}  // namespace

std::vector<SchemaIssue> validate_schema(const nlohmann::json& doc,
                                         const nlohmann::json& schema) {
    std::vector<SchemaIssue> issues;
    validate_node(doc, schema, "", issues);
    return issues;
}

std::string gnuplot_for_trajectory(const std::string& csv_name) {
    return "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set xlabel 'time'\n"
           "set ylabel 'population'\n"
           "plot '" +
           csv_name +
           "' using 1:2 with lines title 'S', \\\n"
           "     '' using 1:3 with lines title 'P', \\\n"
           "     '' using 1:5 with lines title 'b'\n";
}

std::string gnuplot_for_surface(const std::string& csv_name) {
    return "set datafile separator ','\n"
           "set xlabel 'time'\n"
           "set ylabel 'age'\n"
           "set view map\n"
           "splot '" +
           csv_name + "' using 1:2:3 with points pointtype 5 palette notitle\n";
}

}  // namespace agesis
