#include "watermark/chain_report.hpp"

#include <cstdio>
#include <sstream>

namespace watermark {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string report_to_text(const ChainReport& report) {
  std::ostringstream out;
  out << "lambda " << report.lambda << "\n";
  out << "key " << report.key_fingerprint << "\n";
  out << "payload_bits " << report.payload_bits << "\n";
  out << "detections " << report.detections.size() << "\n";
  for (const auto& d : report.detections)
    out << "detection " << d.start << " " << d.end << " "
        << signal_char(d.signal) << " " << d.n << " " << fmt_double(d.score)
        << " " << fmt_double(d.pvalue_bound) << "\n";
  if (report.verification) {
    const auto& v = *report.verification;
    for (const auto& link : v.per_link)
      out << "link " << link.link_index << " expected "
          << link.expected.to_string() << " recovered "
          << link.recovered.to_string() << " match " << (link.match ? 1 : 0)
          << "\n";
    out << "verdict " << (v.verdict ? "True" : "False") << "\n";
    out << "classification " << to_string(v.classification) << "\n";
    out << "coverage " << fmt_double(v.coverage) << "\n";
  }
  return out.str();
}

ChainReport report_from_text(const std::string& text) {
  ChainReport report;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::optional<VerificationReport> verification;

  auto fail = [&](const std::string& what) -> void {
    throw MalformedInputError("chain report: " + what, lineno);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "lambda") {
      if (!(ls >> report.lambda)) fail("bad lambda");
    } else if (tag == "key") {
      if (!(ls >> report.key_fingerprint)) fail("bad key fingerprint");
    } else if (tag == "payload_bits") {
      if (!(ls >> report.payload_bits)) fail("bad payload length");
    } else if (tag == "detections") {
      std::size_t n;
      if (!(ls >> n)) fail("bad detection count");
      report.detections.reserve(n);
    } else if (tag == "detection") {
      BlockDetection d;
      char sig;
      if (!(ls >> d.start >> d.end >> sig >> d.n >> d.score >>
            d.pvalue_bound))
        fail("bad detection record");
      if (sig == '0') d.signal = WatermarkSignal::Zero;
      else if (sig == '1') d.signal = WatermarkSignal::One;
      else fail("bad detection signal");
      report.detections.push_back(d);
    } else if (tag == "link") {
      if (!verification) verification.emplace();
      LinkCheck check;
      std::string kw1, kw2, kw3, expected, recovered;
      int match;
      if (!(ls >> check.link_index >> kw1 >> expected >> kw2 >> recovered >>
            kw3 >> match) ||
          kw1 != "expected" || kw2 != "recovered" || kw3 != "match")
        fail("bad link record");
      check.expected = BitString::from_string(expected);
      check.recovered = BitString::from_string(recovered);
      check.match = match != 0;
      verification->per_link.push_back(std::move(check));
    } else if (tag == "verdict") {
      if (!verification) verification.emplace();
      std::string v;
      if (!(ls >> v) || (v != "True" && v != "False")) fail("bad verdict");
      verification->verdict = v == "True";
    } else if (tag == "classification") {
      if (!verification) verification.emplace();
      std::string c;
      if (!(ls >> c)) fail("bad classification");
      if (c == "unwatermarked")
        verification->classification = Classification::Unwatermarked;
      else if (c == "clean-prefix")
        verification->classification = Classification::CleanPrefix;
      else if (c == "tampered")
        verification->classification = Classification::Tampered;
      else fail("unknown classification '" + c + "'");
    } else if (tag == "coverage") {
      if (!verification) verification.emplace();
      if (!(ls >> verification->coverage)) fail("bad coverage");
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  report.verification = std::move(verification);
  return report;
}

} // namespace watermark
