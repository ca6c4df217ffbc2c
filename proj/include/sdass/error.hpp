#pragma once

#include <stdexcept>
#include <string>

namespace sdass {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input violates a precondition (too few points, empty list, bad parameter).
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

/// Input is structurally valid but not supported by the operation
/// (e.g. boundary detection on a cloud without triangles).
class UnsupportedInputError : public Error {
public:
  using Error::Error;
};

/// A keypoint has too few neighbors or zero scatter; callers may skip it.
class DegenerateKeypointError : public Error {
public:
  using Error::Error;
};

/// A descriptor accumulated no points at all.
class EmptyFeatureError : public Error {
public:
  using Error::Error;
};

/// RANSAC found no hypothesis with enough inliers.
class RegistrationFailureError : public Error {
public:
  using Error::Error;
};

/// Base for all file-format errors.
class ParseError : public Error {
public:
  using Error::Error;
};

/// PLY header is syntactically broken.
class PlyHeaderError : public ParseError {
public:
  using ParseError::ParseError;
};

/// PLY header is well formed but uses a format or element we do not read.
class PlyUnsupportedError : public ParseError {
public:
  using ParseError::ParseError;
};

/// PLY payload ends before the header-declared element counts are satisfied.
class PlyTruncatedError : public ParseError {
public:
  using ParseError::ParseError;
};

/// Feature container file is malformed.
class FeatureFileError : public ParseError {
public:
  using ParseError::ParseError;
};

/// Run manifest is malformed or its recorded input hashes no longer match.
class ManifestError : public ParseError {
public:
  using ParseError::ParseError;
};

} // namespace sdass
