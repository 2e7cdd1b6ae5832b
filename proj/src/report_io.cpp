#include "gaugekit/report_io.hpp"

#include <filesystem>

namespace gaugekit {

using nlohmann::json;

void write_partition_csv(std::ostream& out, const TaggedPartition& p, const Gauge* gauge, const FnSpec* f)
{
    out << "tag,cell_lo,cell_hi,radius_at_tag,f_at_tag\n";
    for (const auto& [tag, cell] : p.items()) {
        out << to_string(tag) << ',' << to_string(cell.lo()) << ',' << to_string(cell.hi()) << ',';
        if (gauge) out << to_string(gauge->radius(tag));
        out << ',';
        if (f) out << to_string((*f)(tag).value);
        out << '\n';
    }
}

void write_realize_csv(std::ostream& out, const GeneratedSet& set, unsigned depth)
{
    out << "depth,lo,hi\n";
    for (const auto& iv : *set.realize(depth))
        out << depth << ',' << to_string(iv.lo()) << ',' << to_string(iv.hi()) << '\n';
}

json to_json(const ValueWithError& v)
{
    json j{{"value", to_string(v.value)}, {"abs_error_bound", to_string(v.abs_error_bound)}};
    if (!v.exact()) j["approx"] = to_double(v.value);
    if (v.by_convention) j["by_convention"] = true;
    return j;
}

json to_json(const Iv& iv) { return json::array({to_string(iv.lo()), to_string(iv.hi())}); }

json describe(const FnSpec& f)
{
    json j{{"name", f.name},
           {"domain", f.domain ? to_json(*f.domain) : json(nullptr)},
           {"exact_on_rationals", f.exact_on_rationals},
           {"has_derivative", static_cast<bool>(f.deriv)},
           {"failure_set", {{"kind", f.failure_set.kind_name()}, {"name", f.failure_set.name()}}},
           {"has_modulus", static_cast<bool>(f.modulus)},
           {"has_dini_certificate", f.dini.has_value()},
           {"has_antiderivative", static_cast<bool>(f.antideriv)}};
    return j;
}

json to_json(const HkReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        json sums = json::array();
        for (const auto& s : row.sums) sums.push_back(to_json(s));
        rows.push_back({{"eps", to_string(row.eps)},
                        {"gauge", row.gauge_name},
                        {"sums", sums},
                        {"min", to_string(row.min)},
                        {"max", to_string(row.max)},
                        {"spread", to_string(row.spread)}});
    }
    return {{"kind", "hk_estimate"},
            {"a", to_string(r.a)},
            {"b", to_string(r.b)},
            {"seed", r.seed},
            {"tolerance", to_string(r.tolerance)},
            {"rows", rows},
            {"converged", r.converged},
            {"note", "sampled evidence over finitely many partitions, not a proof of integrability"}};
}

namespace {

// Side files live next to the report and are named relative to it.
std::string file_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

json sums_json(const VariationSums& s)
{
    return {{"abs_sum", to_json(s.abs_sum)}, {"signed_abs", to_json(s.signed_abs)}, {"tags_in_set", s.tags_in_set}};
}

}  // namespace

json to_json(const VariationReport& r, const std::string& witness_file)
{
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"eps", to_string(row.eps)},
                        {"gauge", row.gauge_name},
                        {"partitions_tried", row.partitions_tried},
                        {"max_abs_sum", to_string(row.max_abs_sum)},
                        {"max_signed_abs", to_string(row.max_signed_abs)},
                        {"pass_nv", row.pass_nv},
                        {"pass_ncv", row.pass_ncv}});
    json j{{"kind", "variation"},
           {"function", r.function},
           {"set", r.set},
           {"domain", to_json(r.domain)},
           {"mode", to_string(r.mode)},
           {"seed", r.seed},
           {"rows", rows},
           {"verdict", to_string(r.verdict)}};
    if (r.witness) {
        j["witness"] = {{"eps", to_string(r.witness->eps)},
                        {"gauge", r.witness->gauge_name},
                        {"cells", r.witness->partition.size()},
                        {"sums", sums_json(r.witness->sums)}};
        if (!witness_file.empty()) j["witness"]["partition_file"] = file_name(witness_file);
    }
    return j;
}

json to_json(const AdversarialResult& r, const std::string& witness_file)
{
    json j{{"kind", "adversarial_variation"},
           {"strategy", r.strategy},
           {"cells", r.witness.size()},
           {"sums", sums_json(r.sums)}};
    if (!witness_file.empty()) j["partition_file"] = file_name(witness_file);
    return j;
}

json to_json(const CovReport& r, const std::string& witness_file)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        json sums = json::array();
        for (const auto& s : row.sums) sums.push_back(to_json(s));
        rows.push_back({{"eps", to_string(row.eps)},
                        {"gauge", row.gauge_name},
                        {"rhs_sums", sums},
                        {"max_discrepancy", to_string(row.max_discrepancy)},
                        {"min_discrepancy", to_string(row.min_discrepancy)},
                        {"pass", row.pass}});
    }
    json j{{"kind", "cov"},
           {"instance", r.instance},
           {"domain", to_json(r.interval)},
           {"seed", r.seed},
           {"lhs", to_json(r.lhs)},
           {"lhs_closed_form", r.lhs_closed_form},
           {"rows", rows},
           {"verdict", to_string(r.verdict)},
           {"channels_agree", r.channels_agree}};
    if (r.ncv_on_b) j["ncv_on_b"] = to_json(*r.ncv_on_b);
    if (r.expected_holds) j["expected"] = *r.expected_holds ? "holds" : "fails";
    if (!witness_file.empty()) j["witness_partition_file"] = file_name(witness_file);
    return j;
}

json to_json(const NcvScanReport& r)
{
    json entries = json::array();
    for (const auto& e : r.entries) entries.push_back({{"window", to_json(e.window)}, {"report", to_json(e.report)}});
    return {{"kind", "ncv_scan"}, {"entries", entries}, {"nv_refuted", r.nv_refuted}};
}

json to_json(const CovScanReport& r)
{
    json entries = json::array();
    for (const auto& e : r.entries) entries.push_back(to_json(e));
    return {{"kind", "cov_scan"},
            {"instance", r.instance},
            {"entries", entries},
            {"all_hold", r.all_hold},
            {"nv_on_b", to_json(r.nv_on_b)},
            {"nv_on_zero_derivative_set", to_json(r.nv_on_zero_derivative_set)},
            {"nv_refuted", r.nv_refuted},
            {"channels_agree", r.channels_agree}};
}

json to_json(const SvcCheck& r)
{
    return {{"kind", "svc_composition"},
            {"n", r.n},
            {"x", to_string(r.x)},
            {"y", to_string(r.y)},
            {"gap_half_length", to_string(r.gap_half_length)},
            {"quotient", to_json(r.quotient)},
            {"quotient_lower", to_double(r.quotient.lower())},
            {"bound_fourth_power", to_string(r.bound_fourth_power)},
            {"bound", r.bound},
            {"ok", r.ok}};
}

void write_report(std::ostream& out, json body)
{
    body["schema"] = kReportSchema;
    out << body.dump(2) << '\n';
}

}  // namespace gaugekit
