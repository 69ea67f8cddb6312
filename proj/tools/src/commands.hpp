#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "report.hpp"
#include "run_config.hpp"

namespace qkd3::cli {

/// Exact S3 at the standard settings for the configured channel, plus the
/// optimizer's best value over the configured settings family.
Report cmd_bell(const RunConfig& config);

/// Joint search over the (|00> + g|11> + |22>) family and the settings.
Report cmd_optimize(const RunConfig& config);

/// Full session; writes transcript.txt, key_a.txt and key_b.txt into `out`
/// when given.
Report cmd_simulate(const RunConfig& config, const std::optional<std::filesystem::path>& out);

/// Post-processing of a recorded transcript.
Report cmd_sift(const std::filesystem::path& transcript, const std::optional<std::filesystem::path>& out);

/// Parity sift of two key files; writes reconciled_a.txt and reconciled_b.txt.
Report cmd_reconcile(const std::filesystem::path& key_a, const std::filesystem::path& key_b,
                     const std::optional<std::filesystem::path>& out);

/// One-time pad over the 27-symbol code. Refuses keys shorter than the message.
Report cmd_encrypt(const std::string& text, const std::filesystem::path& key_file);
Report cmd_decrypt(const std::string& cipher, const std::filesystem::path& key_file);

}  // namespace qkd3::cli
