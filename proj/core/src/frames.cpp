#include "erctk/frames.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/videoio.hpp>

namespace erctk {

namespace {

struct Fragment {
  bool present = false;
  double start = 0.0;
  double end = 0.0;
};

double parse_seconds(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::runtime_error("frames: malformed media fragment time '" + std::string(text) + "'");
  }
  return value;
}

// Split an optional trailing "#t=<start>,<end>" media fragment off the path.
Fragment split_fragment(std::string& path) {
  Fragment fragment;
  std::size_t hash = path.rfind('#');
  if (hash == std::string::npos) return fragment;
  std::string suffix = path.substr(hash);
  if (suffix.rfind("#t=", 0) != 0) {
    throw std::runtime_error("frames: unsupported media fragment '" + suffix + "'");
  }
  std::string body = suffix.substr(3);
  std::size_t comma = body.find(',');
  if (comma == std::string::npos) {
    throw std::runtime_error("frames: malformed media fragment '" + suffix +
                             "' (expected #t=<start>,<end>)");
  }
  fragment.present = true;
  fragment.start = parse_seconds(std::string_view(body).substr(0, comma));
  fragment.end = parse_seconds(std::string_view(body).substr(comma + 1));
  if (fragment.start < 0.0 || fragment.end <= fragment.start) {
    throw std::runtime_error("frames: media fragment window [" + std::to_string(fragment.start) +
                             "," + std::to_string(fragment.end) + "] is not increasing");
  }
  path.resize(hash);
  return fragment;
}

}  // namespace

FrameExtraction extract_frames(const std::string& video_path, int n_frames) {
  if (n_frames <= 0) {
    throw std::runtime_error("frames: n_frames must be positive, got " +
                             std::to_string(n_frames));
  }
  std::string path = video_path;
  Fragment fragment = split_fragment(path);

  cv::VideoCapture capture(path);
  if (!capture.isOpened()) {
    throw std::runtime_error("frames: cannot open video '" + path + "'");
  }
  const double fps = capture.get(cv::CAP_PROP_FPS);
  const long frame_count = std::lround(capture.get(cv::CAP_PROP_FRAME_COUNT));
  if (fps <= 0.0 || frame_count <= 0) {
    throw std::runtime_error("frames: video '" + path + "' reports no decodable frames");
  }
  const double duration = double(frame_count) / fps;

  FrameExtraction extraction;
  extraction.clip_start = fragment.present ? std::min(fragment.start, duration) : 0.0;
  extraction.clip_end = fragment.present ? std::min(fragment.end, duration) : duration;

  auto clamp_index = [&](double seconds) {
    long index = std::lround(seconds * fps);
    return std::clamp(index, 0L, frame_count - 1);
  };
  const long first_index = clamp_index(extraction.clip_start);
  const long last_index = clamp_index(extraction.clip_end);
  const long available = last_index - first_index + 1;

  std::vector<long> wanted;
  if (long(n_frames) >= available) {
    extraction.truncated = long(n_frames) > available;
    for (long i = first_index; i <= last_index; ++i) wanted.push_back(i);
  } else if (n_frames == 1) {
    wanted.push_back(std::lround((first_index + last_index) / 2.0));
  } else {
    const double step = double(last_index - first_index) / double(n_frames - 1);
    for (int i = 0; i < n_frames; ++i) {
      wanted.push_back(std::clamp(std::lround(first_index + step * i), first_index, last_index));
    }
  }

  // Sequential decode is exact for every container; seeking is not.
  std::size_t next = 0;
  cv::Mat image;
  for (long index = 0; index <= last_index && next < wanted.size(); ++index) {
    if (!capture.read(image)) {
      throw std::runtime_error("frames: decode stopped early in '" + path + "' at frame " +
                               std::to_string(index));
    }
    if (index != wanted[next]) continue;
    Frame frame;
    frame.index = int(next);
    frame.timestamp_sec = double(index) / fps;
    frame.width = image.cols;
    frame.height = image.rows;
    std::vector<unsigned char> png;
    if (!cv::imencode(".png", image, png)) {
      throw std::runtime_error("frames: PNG encoding failed for '" + path + "'");
    }
    frame.png = std::move(png);
    extraction.frames.push_back(std::move(frame));
    ++next;
  }
  if (next != wanted.size()) {
    throw std::runtime_error("frames: video '" + path + "' ended before the sampling window");
  }
  return extraction;
}

}  // namespace erctk
