#include "commands.hpp"

#include <cmath>
#include <fstream>

#include "qkd3/errors.hpp"
#include "qkd3/reconciliation.hpp"
#include "qkd3/tritcrypt.hpp"

namespace qkd3::cli {

namespace {

SettingsPair standard_settings() {
  const auto a = PartyConfig::standard(Arm::A);
  const auto b = PartyConfig::standard(Arm::B);
  return {a.bases[0], a.bases[1], b.bases[0], b.bases[1]};
}

std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void describe_session(Report& r, const ProtocolRun& run, std::size_t n_rounds) {
  const auto& res = run.result;
  r.line("Rounds:           " + std::to_string(n_rounds));
  r.line("Sifted fractions: key " + fixed(res.fractions.key) + ", bell " + fixed(res.fractions.bell) +
         ", discard " + fixed(res.fractions.discard));
  r.line("Key length:       " + std::to_string(res.key_a.size()) + " trits");
  r.line("S3 estimate:      " + fixed(res.s3_estimate) + " +- " + fixed(res.s3_sigma));
  r.line("QTER:             " + fixed(res.qter));
  r.blank();
  r.line("Classical channel:");
  for (const auto& m : run.transcript) {
    r.line(std::string("  ") + (m.sender == Arm::A ? "A" : "B") + " -> " + (m.sender == Arm::A ? "B" : "A") + "  " +
           m.topic + " (" + std::to_string(m.items) + "): " + m.summary);
  }
  r.blank();
  r.line("Verdict:");
  std::size_t start = 0;
  const auto& text = run.verdict.report;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    r.line("  " + text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }

  r.value("rounds", n_rounds);
  r.value("fraction_key", res.fractions.key);
  r.value("fraction_bell", res.fractions.bell);
  r.value("fraction_discard", res.fractions.discard);
  r.value("key_length", res.key_a.size());
  r.value("s3_estimate", res.s3_estimate);
  r.value("s3_sigma", res.s3_sigma);
  r.value("sigmas_above_bound", run.verdict.sigmas_above_bound);
  r.value("qter", res.qter);
  r.value("qter_within_bound", run.verdict.qter_within_bound);
  r.value("secure", res.secure);
}

void write_keys(const std::filesystem::path& dir, const SessionResult& res, const std::string& origin) {
  write_key_file(dir / "key_a.txt", res.key_a, {"sifted key of A", origin});
  write_key_file(dir / "key_b.txt", res.key_b, {"sifted key of B (1 and 2 exchanged)", origin});
}

TritString key_prefix(const std::filesystem::path& key_file, std::size_t needed, Report& r) {
  const auto key = read_key_file(key_file);
  if (key.size() < needed) {
    throw ValidationError("key too short: message needs " + std::to_string(needed) + " trits, key has " +
                          std::to_string(key.size()));
  }
  const std::size_t unused = key.size() - needed;
  r.line("Key:    " + std::to_string(key.size()) + " trits, " + std::to_string(needed) + " used, " +
         std::to_string(unused) + " unused");
  if (unused > 0) r.line("        the unused tail starts at trit " + std::to_string(needed) + "; never reuse the used part");
  r.value("key_used", needed);
  r.value("key_unused", unused);
  return key.substr(0, needed);
}

}  // namespace

Report cmd_bell(const RunConfig& config) {
  Report r("CGLMP Bell parameter");
  r.config(config.entries());
  const auto state = channel_state(config.source(), config.eve());
  const double exact = s3(state, standard_settings()).s3;
  // The settings families are written for the diagonal labeling.
  const auto opt = optimize_s3(relabel_b_swap12(state), config.optimizer());

  r.line("S3 at standard settings: " + fixed(exact));
  r.line("S3 optimized:            " + fixed(opt.s3) + (opt.converged ? "" : " (optimizer did not converge)"));
  r.line("Quantum maximum:         " + fixed(kQuantumMax) + " (maximally entangled state)");
  r.line("Local-realism bound:     " + fixed(kClassicalBound));
  r.line("Visibility threshold:    " + fixed(visibility_threshold()));
  r.line(exact > kClassicalBound ? "The standard settings violate local realism."
                                 : "The standard settings do not violate local realism.");

  r.value("s3_exact", exact);
  r.value("s3_optimized", opt.s3);
  r.value("optimizer_converged", opt.converged);
  r.value("s3_quantum_max", kQuantumMax);
  r.value("classical_bound", kClassicalBound);
  r.value("visibility_threshold", visibility_threshold());
  r.value("violation", exact > kClassicalBound);
  return r;
}

Report cmd_optimize(const RunConfig& config) {
  Report r("Non-maximally entangled optimum");
  r.config(config.entries());
  const auto opt = optimize_s3_with_state([](double g) { return MixedState::pure(asymmetric_state(g)); }, 0.0, 2.0,
                                          config.optimizer());
  r.line("State family:  (|00> + g|11> + |22>) / sqrt(2 + g^2), g in [0, 2]");
  r.line("Best g:        " + fixed(opt.state_parameter));
  r.line("S3 maximum:    " + fixed(opt.s3));
  r.line("Reference:     " + fixed(kNonMaximalMax) + " (1 + sqrt(11/3))");
  r.line("Maximal state: " + fixed(kQuantumMax));

  r.value("gamma", opt.state_parameter);
  r.value("s3_optimized", opt.s3);
  r.value("s3_reference", kNonMaximalMax);
  r.value("s3_maximal_state", kQuantumMax);
  r.value("optimizer_converged", opt.converged);
  return r;
}

Report cmd_simulate(const RunConfig& config, const std::optional<std::filesystem::path>& out) {
  Report r("Qutrit key distribution session");
  r.config(config.entries());
  const auto source = config.source();
  const auto eve = config.eve();
  const auto a = config.party(Arm::A);
  const auto b = config.party(Arm::B);
  r.line("Effective noise: background_fraction " + fixed(source.background_fraction, 6) + ", key_crosstalk " +
         fixed(source.key_crosstalk, 6));

  const auto records = run_session(config.n_rounds, source, eve, a, b, config.seed);
  const auto run = run_protocol(records);
  const double exact_s3 = s3(channel_state(source, eve), SettingsPair{a.bases[0], a.bases[1], b.bases[0], b.bases[1]}).s3;
  const double exact_qter = exact_key_error_rate(source, eve, a, b);
  r.line("Exact S3 " + fixed(exact_s3) + ", exact QTER " + fixed(exact_qter));
  r.blank();
  describe_session(r, run, records.size());
  r.value("s3_exact", exact_s3);
  r.value("qter_exact", exact_qter);
  r.value("background_fraction", source.background_fraction);
  r.value("key_crosstalk", source.key_crosstalk);

  if (out) {
    const auto dir = prepare_dir(*out);
    const auto path = dir / "transcript.txt";
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    std::vector<std::string> header{"qkd3 simulate"};
    for (const auto& [k, v] : config.entries()) header.push_back(k + " = " + v);
    write_transcript(f, records, header);
    if (!f) throw IoError("failed writing " + path.string());
    write_keys(dir, run.result, "seed " + std::to_string(config.seed));
    r.blank();
    r.line("Wrote " + path.string() + ", key_a.txt and key_b.txt");
  }
  return r;
}

Report cmd_sift(const std::filesystem::path& transcript, const std::optional<std::filesystem::path>& out) {
  Report r("Transcript post-processing");
  std::ifstream in(transcript);
  if (!in) throw IoError("cannot open transcript " + transcript.string());
  Transcript t;
  try {
    t = read_transcript(in);
  } catch (const IoError& e) {
    throw IoError(transcript.string() + ": " + e.what());
  }
  if (t.records.empty()) throw InsufficientDataError("transcript holds no rounds");
  r.line("Transcript: " + transcript.string());
  for (const auto& h : t.header) r.line("  # " + h);
  r.blank();
  const auto run = run_protocol(t.records);
  describe_session(r, run, t.records.size());
  if (out) {
    const auto dir = prepare_dir(*out);
    write_keys(dir, run.result, "from " + transcript.filename().string());
    r.blank();
    r.line("Wrote key_a.txt and key_b.txt to " + dir.string());
  }
  return r;
}

Report cmd_reconcile(const std::filesystem::path& key_a, const std::filesystem::path& key_b,
                     const std::optional<std::filesystem::path>& out) {
  Report r("Parity-block reconciliation");
  const auto a = read_key_file(key_a);
  const auto b = read_key_file(key_b);
  const auto rec = parity_sift(a, b);
  const auto& rep = rec.report;
  const double before = a.size() == b.size() && !a.empty() ? qter(a, b) : 0.0;
  r.line("Input:  " + std::to_string(a.size()) + " trits, " + std::to_string(a.size() / kBlockSize) +
         " blocks, error rate " + fixed(before));
  r.line("Kept " + std::to_string(rep.kept_blocks) + " blocks, discarded " + std::to_string(rep.discarded_blocks));
  r.line("Output: " + std::to_string(rep.output_length) + " trits, " + std::to_string(rep.residual_mismatches) +
         " residual mismatches");
  if (rep.dropped_trailing > 0) {
    r.line("Note: " + std::to_string(rep.dropped_trailing) + " trailing trits beyond the last full block were dropped");
  }
  r.value("input_length", a.size());
  r.value("input_error_rate", before);
  r.value("kept_blocks", rep.kept_blocks);
  r.value("discarded_blocks", rep.discarded_blocks);
  r.value("output_length", rep.output_length);
  r.value("residual_mismatches", rep.residual_mismatches);
  r.value("dropped_trailing", rep.dropped_trailing);
  if (out) {
    const auto dir = prepare_dir(*out);
    write_key_file(dir / "reconciled_a.txt", rec.key_a, {"reconciled key of A"});
    write_key_file(dir / "reconciled_b.txt", rec.key_b, {"reconciled key of B"});
    r.line("Wrote reconciled_a.txt and reconciled_b.txt to " + dir.string());
  }
  return r;
}

Report cmd_encrypt(const std::string& text, const std::filesystem::path& key_file) {
  Report r("Trit one-time pad: encrypt");
  const auto code = encode(text);
  const auto key = key_prefix(key_file, code.size(), r);
  const auto cipher = encrypt(code, key);
  r.line("Text:   " + text);
  r.line("Code:   " + code.str(kTritsPerSymbol));
  r.line("Cipher: " + cipher.str(kTritsPerSymbol));
  r.value("cipher", cipher.str());
  return r;
}

Report cmd_decrypt(const std::string& cipher_text, const std::filesystem::path& key_file) {
  Report r("Trit one-time pad: decrypt");
  const auto cipher = TritString::parse(cipher_text);
  const auto key = key_prefix(key_file, cipher.size(), r);
  const auto code = decrypt(cipher, key);
  const auto text = decode(code);
  r.line("Cipher: " + cipher.str(kTritsPerSymbol));
  r.line("Code:   " + code.str(kTritsPerSymbol));
  r.line("Text:   " + text);
  r.value("code", code.str());
  r.value("text", "\"" + text + "\"");
  return r;
}

}  // namespace qkd3::cli
