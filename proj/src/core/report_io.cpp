#include "core/report_io.hpp"

#include <cstdio>

namespace fracsob {

std::string format_float17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

namespace {

void json_kv(std::string& out, const char* key, const std::string& value, bool quote) {
    out += '"';
    out += key;
    out += "\": ";
    if (quote) out += '"';
    out += value;
    if (quote) out += '"';
}

}  // namespace

std::string report_to_json(const ExperimentReport& r) {
    std::string o;
    o.reserve(4096);
    o += "{\n  ";
    json_kv(o, "schema", "report-v1", true);
    o += ",\n  ";
    json_kv(o, "experiment_id", r.experiment_id, true);
    o += ",\n  ";
    json_kv(o, "theorem_tag", r.theorem_tag, true);
    o += ",\n  \"parameters\": {";
    const ExperimentParams& p = r.params;
    o += "\"n\": " + std::to_string(p.n);
    o += ", \"N\": " + std::to_string(p.N);
    o += ", \"s\": " + format_float17(p.s);
    o += ", \"t\": " + format_float17(p.t);
    o += ", \"p\": " + format_float17(p.p);
    o += ", \"q\": " + format_float17(p.q);
    o += ", \"mu\": " + format_float17(p.mu);
    o += ", \"s0\": " + format_float17(p.s0);
    o += ", \"s1\": " + format_float17(p.s1);
    o += ", \"seed\": " + std::to_string(p.seed);
    o += ", \"ensemble_size\": " + std::to_string(r.per_member.size());
    o += "},\n  \"tolerance\": {";
    o += "\"identity\": " + format_float17(p.tol_identity);
    o += ", \"drift\": " + format_float17(p.tol_drift);
    o += "},\n  \"per_member\": [";
    for (std::size_t i = 0; i < r.per_member.size(); ++i) {
        const MemberResult& m = r.per_member[i];
        o += i == 0 ? "\n" : ",\n";
        o += "    {\"seed\": " + std::to_string(m.seed);
        o += ", \"numerator\": " + format_float17(m.numerator);
        o += ", \"denominator\": " + format_float17(m.denominator);
        o += ", \"ratio\": " + format_float17(m.ratio);
        if (r.refined) o += ", \"ratio_refined\": " + format_float17(m.ratio_refined);
        o += "}";
    }
    o += "\n  ],\n  \"aggregate\": {";
    o += "\"max\": " + format_float17(r.aggregate.max);
    o += ", \"min\": " + format_float17(r.aggregate.min);
    o += ", \"median\": " + format_float17(r.aggregate.median);
    o += "}";
    if (r.refined) {
        o += ",\n  \"refinement\": {";
        o += "\"points_per_axis_fine\": " + std::to_string(2 * p.N);
        o += ", \"drift_median\": " + format_float17(r.drift_median);
        o += ", \"drift_max\": " + format_float17(r.drift_max);
        o += "}";
    }
    if (!r.extras.empty()) {
        o += ",\n  \"extras\": {";
        for (std::size_t i = 0; i < r.extras.size(); ++i) {
            if (i) o += ", ";
            o += "\"" + r.extras[i].first + "\": " + format_float17(r.extras[i].second);
        }
        o += "}";
    }
    o += ",\n  ";
    json_kv(o, "note", r.note, true);
    o += ",\n  \"pass\": ";
    o += r.pass ? "true" : "false";
    o += "\n}\n";
    return o;
}

std::string report_to_csv(const ExperimentReport& r) {
    std::string o = "seed,numerator,denominator,ratio\n";
    for (const MemberResult& m : r.per_member) {
        o += std::to_string(m.seed);
        o += ',';
        o += format_float17(m.numerator);
        o += ',';
        o += format_float17(m.denominator);
        o += ',';
        o += format_float17(m.ratio);
        o += '\n';
    }
    return o;
}

std::string suite_summary_csv(const std::vector<ExperimentReport>& reports) {
    std::string o = "theorem_tag,experiment_id,pass,ratio_max,ratio_min,ratio_median,drift_median\n";
    for (const ExperimentReport& r : reports) {
        o += r.theorem_tag;
        o += ',';
        o += r.experiment_id;
        o += ',';
        o += r.pass ? "1" : "0";
        o += ',';
        o += format_float17(r.aggregate.max);
        o += ',';
        o += format_float17(r.aggregate.min);
        o += ',';
        o += format_float17(r.aggregate.median);
        o += ',';
        o += format_float17(r.drift_median);
        o += '\n';
    }
    return o;
}

}  // namespace fracsob
