#pragma once

#include <string>
#include <vector>

namespace erctk {

struct Frame {
  int index = 0;  // position among the extracted frames
  double timestamp_sec = 0.0;
  int width = 0;
  int height = 0;
  std::vector<unsigned char> png;  // encoded PNG bytes
};

struct FrameExtraction {
  std::vector<Frame> frames;
  double clip_start = 0.0;  // resolved sampling window, seconds
  double clip_end = 0.0;
  bool truncated = false;  // fewer frames available than requested
};

// `video_path` may end in a media-fragment suffix "#t=<start>,<end>"
// restricting sampling to that window. n_frames == 1 samples the window
// midpoint; n_frames >= 2 samples evenly including both endpoints. When
// the clip holds fewer frames than requested, every frame in the window is
// returned and `truncated` is set.
FrameExtraction extract_frames(const std::string& video_path, int n_frames);

}  // namespace erctk
