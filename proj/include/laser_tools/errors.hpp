#pragma once

#include <stdexcept>
#include <string>

namespace laser_tools {

/// A frame is unknown to the transform tree, or two frames are not connected.
class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scan, cloud or record content. The message carries line or key context.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration file: unknown or missing keys, bad transforms, bad values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure (missing file, unwritable destination).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace laser_tools
