#include "courtmot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace courtmot {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

[[noreturn]] void bad_line(const std::string& path, int line, const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& path, int line) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    bad_line(path, line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size()) bad_line(path, line, "trailing characters in number '" + tok + "'");
  if (!std::isfinite(v)) bad_line(path, line, "non-finite value '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, const std::string& path, int line) {
  size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    bad_line(path, line, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size()) bad_line(path, line, "trailing characters in integer '" + tok + "'");
  return static_cast<int>(v);
}

std::string join_ids(const std::vector<int>& ids) {
  if (ids.empty()) return "-";
  std::string s;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(ids[i]);
  }
  return s;
}

}  // namespace

std::string fmt_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  // Avoid the two representations of zero.
  std::string s(buf);
  if (s.find_first_of("123456789") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

void write_cloud(const std::string& path, const PointCloud& cloud) {
  auto out = open_out(path);
  out << "frame=" << cloud.frame_id << " t=" << fmt_double(cloud.timestamp) << "\n";
  for (const auto& p : cloud.points)
    out << fmt_double(p.x()) << ' ' << fmt_double(p.y()) << ' ' << fmt_double(p.z()) << "\n";
}

PointCloud read_cloud(const std::string& path) {
  auto in = open_in(path);
  PointCloud cloud;
  std::string line;
  int ln = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty cloud file");
  ++ln;
  const auto head = split_ws(line);
  if (head.size() != 2 || head[0].rfind("frame=", 0) != 0 || head[1].rfind("t=", 0) != 0)
    bad_line(path, ln, "expected header 'frame=<id> t=<seconds>'");
  cloud.frame_id = head[0].substr(6);
  cloud.timestamp = parse_double(head[1].substr(2), path, ln);
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto toks = split_ws(line);
    if (toks.size() != 3) bad_line(path, ln, "expected 'x y z'");
    cloud.points.emplace_back(parse_double(toks[0], path, ln), parse_double(toks[1], path, ln),
                              parse_double(toks[2], path, ln));
  }
  return cloud;
}

void write_tracks(const std::string& path, const SequenceTable& table) {
  auto out = open_out(path);
  for (size_t f = 0; f < table.frames.size(); ++f) {
    auto boxes = table.frames[f];
    std::sort(boxes.begin(), boxes.end(),
              [](const TrackedBox& a, const TrackedBox& b) { return a.id < b.id; });
    for (const auto& b : boxes)
      out << (f + 1) << ' ' << b.id << ' ' << fmt_double(b.box.cx) << ' '
          << fmt_double(b.box.cy) << ' ' << fmt_double(b.box.w) << ' ' << fmt_double(b.box.h)
          << "\n";
  }
}

SequenceTable read_tracks(const std::string& path) {
  auto in = open_in(path);
  SequenceTable table;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto toks = split_ws(line);
    if (toks.size() != 6) bad_line(path, ln, "expected 't id cx cy w h'");
    const int t = parse_int(toks[0], path, ln);
    if (t < 1) bad_line(path, ln, "frame index must be positive");
    TrackedBox b;
    b.id = parse_int(toks[1], path, ln);
    b.box = PlaneBox{parse_double(toks[2], path, ln), parse_double(toks[3], path, ln),
                     parse_double(toks[4], path, ln), parse_double(toks[5], path, ln)};
    table.ensure_frame(t);
    for (const auto& existing : table.frame(t))
      if (existing.id == b.id) bad_line(path, ln, "duplicate id " + toks[1] + " in frame " + toks[0]);
    table.frame(t).push_back(b);
  }
  table.sort_frames();
  return table;
}

void write_plane_detections(const std::string& path,
                            const std::map<int, std::vector<BevBox>>& dets,
                            const BevGrid& grid) {
  auto out = open_out(path);
  for (const auto& [t, boxes] : dets)
    for (const auto& b : boxes) {
      const PlaneBox p = plane_box_from_bev(b, grid);
      out << t << " -1 " << fmt_double(p.cx) << ' ' << fmt_double(p.cy) << ' ' << fmt_double(p.w)
          << ' ' << fmt_double(p.h) << ' ' << fmt_double(b.confidence) << "\n";
    }
}

std::map<int, std::vector<BevBox>> read_plane_detections(const std::string& path,
                                                         const BevGrid& grid) {
  auto in = open_in(path);
  std::map<int, std::vector<BevBox>> dets;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto toks = split_ws(line);
    if (toks.size() != 7) bad_line(path, ln, "expected 't id_hint cx cy w h conf'");
    const int t = parse_int(toks[0], path, ln);
    if (t < 1) bad_line(path, ln, "frame index must be positive");
    parse_int(toks[1], path, ln);  // id hint, -1 when unknown; replay ignores it
    const PlaneBox p{parse_double(toks[2], path, ln), parse_double(toks[3], path, ln),
                     parse_double(toks[4], path, ln), parse_double(toks[5], path, ln)};
    BevBox b = bev_box_from_plane(p, grid);
    b.confidence = parse_double(toks[6], path, ln);
    if (b.confidence < 0.0 || b.confidence > 1.0)
      bad_line(path, ln, "confidence outside [0, 1]");
    dets[t].push_back(b);
  }
  return dets;
}

void write_camera_gt(const std::string& path,
                     const std::vector<std::vector<CameraGtBox>>& frames) {
  auto out = open_out(path);
  for (size_t f = 0; f < frames.size(); ++f)
    for (const auto& g : frames[f])
      out << (f + 1) << ' ' << g.id << ' ' << fmt_double(g.box.x0) << ' '
          << fmt_double(g.box.y0) << ' ' << fmt_double(g.box.width()) << ' '
          << fmt_double(g.box.height()) << ' ' << fmt_double(g.visibility) << "\n";
}

std::vector<std::vector<CameraGtBox>> read_camera_gt(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<CameraGtBox>> frames;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto toks = split_ws(line);
    if (toks.size() != 7) bad_line(path, ln, "expected 't id x y w h vis'");
    const int t = parse_int(toks[0], path, ln);
    if (t < 1) bad_line(path, ln, "frame index must be positive");
    CameraGtBox g;
    g.id = parse_int(toks[1], path, ln);
    const double x = parse_double(toks[2], path, ln);
    const double y = parse_double(toks[3], path, ln);
    const double w = parse_double(toks[4], path, ln);
    const double h = parse_double(toks[5], path, ln);
    g.box = Rect{x, y, x + w, y + h};
    g.visibility = parse_double(toks[6], path, ln);
    if (g.visibility < 0.0 || g.visibility > 1.0)
      bad_line(path, ln, "visibility outside [0, 1]");
    if (frames.size() < static_cast<size_t>(t)) frames.resize(t);
    frames[t - 1].push_back(g);
  }
  return frames;
}

void write_camera_detections(const std::string& path,
                             const std::map<int, std::vector<PixelDetection>>& dets) {
  auto out = open_out(path);
  for (const auto& [t, boxes] : dets)
    for (const auto& d : boxes)
      out << t << " -1 " << fmt_double(d.box.x0) << ' ' << fmt_double(d.box.y0) << ' '
          << fmt_double(d.box.width()) << ' ' << fmt_double(d.box.height()) << ' '
          << fmt_double(d.confidence) << "\n";
}

std::map<int, std::vector<PixelDetection>> read_camera_detections(const std::string& path) {
  auto in = open_in(path);
  std::map<int, std::vector<PixelDetection>> dets;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto toks = split_ws(line);
    if (toks.size() != 7) bad_line(path, ln, "expected 't id_hint x y w h conf'");
    const int t = parse_int(toks[0], path, ln);
    if (t < 1) bad_line(path, ln, "frame index must be positive");
    parse_int(toks[1], path, ln);  // id hint, -1 when unknown; replay ignores it
    const double x = parse_double(toks[2], path, ln);
    const double y = parse_double(toks[3], path, ln);
    const double w = parse_double(toks[4], path, ln);
    const double h = parse_double(toks[5], path, ln);
    PixelDetection d;
    d.box = Rect{x, y, x + w, y + h};
    d.confidence = parse_double(toks[6], path, ln);
    dets[t].push_back(d);
  }
  return dets;
}

void write_embeddings(const std::string& path, const StoredEmbeddingProvider& provider) {
  auto out = open_out(path);
  for (const auto& [key, v] : provider.entries()) {
    out << std::get<0>(key) << ' ' << std::get<1>(key) << ' ' << std::get<2>(key);
    for (const double x : v.values()) out << ' ' << fmt_double(x, 9);
    out << "\n";
  }
}

StoredEmbeddingProvider read_embeddings(const std::string& path) {
  auto in = open_in(path);
  StoredEmbeddingProvider provider;
  std::string line;
  int ln = 0;
  size_t dim = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto toks = split_ws(line);
    if (toks.size() < 4) bad_line(path, ln, "expected 'id t camera v1 ... vd'");
    if (dim == 0) dim = toks.size() - 3;
    if (toks.size() - 3 != dim) bad_line(path, ln, "inconsistent embedding dimension");
    const int id = parse_int(toks[0], path, ln);
    const int t = parse_int(toks[1], path, ln);
    if (t < 1) bad_line(path, ln, "frame index must be positive");
    const int camera = parse_int(toks[2], path, ln);
    std::vector<double> v(dim);
    for (size_t i = 0; i < dim; ++i) v[i] = parse_double(toks[3 + i], path, ln);
    try {
      provider.put(id, t, camera, EmbeddingVector(std::move(v)));
    } catch (const std::invalid_argument& e) {
      bad_line(path, ln, e.what());
    }
  }
  return provider;
}

void write_sessions(const std::string& path, const std::vector<OcclusionSession>& sessions) {
  auto out = open_out(path);
  for (const auto& s : sessions)
    out << "session=" << s.index << " start=" << s.t_start << " end=" << s.t_end
        << " ref=" << s.n_ref << " lost=" << join_ids(s.lost_ids)
        << " gain=" << join_ids(s.gain_ids) << " near_lost=" << join_ids(s.neighbor_lost_ids)
        << " near_gain=" << join_ids(s.neighbor_gain_ids)
        << " status=" << (s.open ? "open" : "closed") << "\n";
}

void write_search_records(const std::string& path, const std::vector<SearchRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) {
    out << "session=" << r.session_index << " target=" << r.target_id << " direction="
        << (r.direction == SearchDirection::Backward ? "backward" : "forward");
    if (r.found) {
      const Rect& b = r.ref.projected_box;
      out << " camera=" << r.ref.camera << " frame=" << r.ref.frame << " box="
          << fmt_double(b.x0) << ',' << fmt_double(b.y0) << ',' << fmt_double(b.width()) << ','
          << fmt_double(b.height()) << " status=found\n";
    } else {
      out << " camera=- frame=- box=- status=exhausted\n";
    }
  }
}

void write_remap_outcomes(const std::string& path, const std::vector<RemapOutcome>& outcomes) {
  auto out = open_out(path);
  for (const auto& o : outcomes) {
    out << "session=" << o.session_index << " applied=" << (o.applied ? "yes" : "no")
        << " pairs=";
    if (o.applied_pairs.empty()) {
      out << '-';
    } else {
      for (size_t i = 0; i < o.applied_pairs.size(); ++i) {
        if (i) out << ',';
        out << o.applied_pairs[i].first << "->" << o.applied_pairs[i].second;
      }
    }
    out << " reason=" << (o.reason.empty() ? "-" : o.reason) << "\n";
  }
}

void write_keyvalues(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& rows) {
  auto out = open_out(path);
  for (const auto& [k, v] : rows) out << k << '=' << v << "\n";
}

std::string format_metrics(const MetricsReport& r) {
  std::ostringstream out;
  out << "mota=" << fmt_double(r.mota, 9) << "\n";
  out << "idf1=" << fmt_double(r.idf1, 9) << "\n";
  out << "hota=" << fmt_double(r.hota, 9) << "\n";
  out << "det_a=" << fmt_double(r.det_a, 9) << "\n";
  out << "ass_a=" << fmt_double(r.ass_a, 9) << "\n";
  out << "r_id=" << fmt_double(r.r_id, 9) << "\n";
  out << "r_id_no_events=" << (r.r_id_no_events ? 1 : 0) << "\n";
  if (r.hota_sweep >= 0.0) out << "hota_sweep=" << fmt_double(r.hota_sweep, 9) << "\n";
  out << "tp=" << r.tp << "\n";
  out << "fp=" << r.fp << "\n";
  out << "fn=" << r.fn << "\n";
  out << "id_switches=" << r.idsw << "\n";
  out << "reestablished=" << r.n_re << "\n";
  out << "discontinued=" << r.n_dis << "\n";
  out << "gt_total=" << r.gt_total << "\n";
  out << "pred_total=" << r.pred_total << "\n";
  out << "distance_threshold=" << fmt_double(r.distance_threshold, 9) << "\n";
  return out.str();
}

void write_metrics(const std::string& path, const MetricsReport& report) {
  auto out = open_out(path);
  out << format_metrics(report);
}

std::map<std::string, std::string> read_keyvalues(const std::string& path) {
  auto in = open_in(path);
  std::map<std::string, std::string> rows;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) bad_line(path, ln, "expected 'key=value'");
    rows[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return rows;
}

}  // namespace courtmot
