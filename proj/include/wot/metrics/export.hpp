#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "wot/metrics/reduce.hpp"

namespace wot::metrics {

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Files written by export_bundle; column layouts are listed in
/// docs/metrics.md.
inline constexpr const char* kRetrievalCdfCsv = "retrieval_cdf.csv";
inline constexpr const char* kSuccessCsv = "success.csv";
inline constexpr const char* kServerRateCsv = "server_rate.csv";
inline constexpr const char* kLinkStressCsv = "link_stress.csv";
inline constexpr const char* kCryptoCsv = "crypto.csv";
inline constexpr const char* kSummaryJson = "summary.json";

/// Writes one CSV per metric family plus summary.json into `dir`, creating
/// it if needed. Throws ExportError when a file cannot be written.
void export_bundle(const MetricsBundle& bundle, const std::filesystem::path& dir);

std::string retrieval_cdf_csv(const MetricsBundle& bundle);
std::string success_csv(const MetricsBundle& bundle);
std::string server_rate_csv(const MetricsBundle& bundle);
std::string link_stress_csv(const MetricsBundle& bundle);
std::string crypto_csv(const MetricsBundle& bundle);
std::string summary_json(const MetricsBundle& bundle);

} // namespace wot::metrics
