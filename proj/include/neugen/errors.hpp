#pragma once

#include <stdexcept>
#include <string>

namespace neugen {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FileNotFound : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct InvalidChannelCount : Error { using Error::Error; };
struct InvalidPatchSize : Error { using Error::Error; };
struct PatchTooLarge : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct TooFewImages : Error { using Error::Error; };
struct ImageTooSmall : Error { using Error::Error; };
struct EmptyRay : Error { using Error::Error; };
struct InvalidCamera : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct NotADirectory : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };

} // namespace neugen
