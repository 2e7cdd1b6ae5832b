#pragma once

#include "gaugekit/cov.hpp"
#include "gaugekit/funcs.hpp"
#include "gaugekit/integrate.hpp"
#include "gaugekit/partition.hpp"
#include "gaugekit/variation.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>

namespace gaugekit {

inline constexpr const char* kReportSchema = "gaugekit/1";

// One row per item: tag, cell_lo, cell_hi, radius_at_tag, f_at_tag, all as
// "num/den". Columns without a gauge or function are left empty; an
// inexact f value is written as its midpoint.
void write_partition_csv(std::ostream& out, const TaggedPartition& p, const Gauge* gauge = nullptr,
                         const FnSpec* f = nullptr);

// depth, lo, hi per surviving interval.
void write_realize_csv(std::ostream& out, const GeneratedSet& set, unsigned depth);

nlohmann::json to_json(const ValueWithError& v);
nlohmann::json to_json(const Iv& iv);
nlohmann::json describe(const FnSpec& f);
nlohmann::json to_json(const HkReport& r);
// `witness_file` names the CSV holding the witness partition, if written.
nlohmann::json to_json(const VariationReport& r, const std::string& witness_file = "");
nlohmann::json to_json(const AdversarialResult& r, const std::string& witness_file = "");
nlohmann::json to_json(const CovReport& r, const std::string& witness_file = "");
nlohmann::json to_json(const NcvScanReport& r);
nlohmann::json to_json(const CovScanReport& r);
nlohmann::json to_json(const SvcCheck& r);

// Adds the schema tag and writes with a trailing newline.
void write_report(std::ostream& out, nlohmann::json body);

}  // namespace gaugekit
