//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_ERRORS_HPP_
#define MOLDKL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace moldkl {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) { }
};

// --- parsing ---------------------------------------------------------------

// SMILES rejection. offset() is the byte position of the offending character
// in the original input string.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string &what)
      : Error(what + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) { }

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EmptyInput : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownElement : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnclosedRing : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnbalancedParen : public ParseError {
 public:
  using ParseError::ParseError;
};

class BadSyntax : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnsupportedFeature : public ParseError {
 public:
  using ParseError::ParseError;
};

// Also covers kekulization failures on aromatic input.
class ValenceViolation : public ParseError {
 public:
  using ParseError::ParseError;
};

// --- numerics --------------------------------------------------------------

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Cholesky pivot failure; pivot() is the zero-based index of the first
// non-positive diagonal entry encountered.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, const std::string &what)
      : Error(what + " (pivot " + std::to_string(pivot) + ")"),
        pivot_(pivot) { }

  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

// Raised when jitter escalation is exhausted or an objective stops being
// finite. Callers map this to a dedicated process exit code.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateTargets : public Error {
 public:
  using Error::Error;
};

class LatentDimUnsupported : public Error {
 public:
  using Error::Error;
};

// --- encoding --------------------------------------------------------------

class UnknownToken : public Error {
 public:
  using Error::Error;
};

class SequenceTooLong : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class EncodeFailure : public Error {
 public:
  using Error::Error;
};

// --- similarity / statistics ------------------------------------------------

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class WidthMismatch : public Error {
 public:
  using Error::Error;
};

class ConstantInput : public Error {
 public:
  using Error::Error;
};

class AnchorNotFound : public Error {
 public:
  using Error::Error;
};

class KTooLarge : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

// --- datasets / artifacts ----------------------------------------------------

class MissingColumn : public Error {
 public:
  using Error::Error;
};

class DuplicateId : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

class DatasetTooSmall : public Error {
 public:
  using Error::Error;
};

class SubsetTooLarge : public Error {
 public:
  using Error::Error;
};

// Record-level QM9 rejection; line() is one-based within the file.
class Qm9Malformed : public Error {
 public:
  Qm9Malformed(std::size_t line, const std::string &what)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) { }

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MalformedHeader : public Qm9Malformed {
 public:
  using Qm9Malformed::Qm9Malformed;
};

class PropertyCountMismatch : public Qm9Malformed {
 public:
  using Qm9Malformed::Qm9Malformed;
};

class AtomCountMismatch : public Qm9Malformed {
 public:
  using Qm9Malformed::Qm9Malformed;
};

class UnparseableNumber : public Qm9Malformed {
 public:
  UnparseableNumber(std::size_t line, std::size_t column,
                    const std::string &what)
      : Qm9Malformed(line, what + " (column " + std::to_string(column) + ")"),
        column_(column) { }

  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptFile : public Error {
 public:
  using Error::Error;
};

class ArtifactMismatch : public Error {
 public:
  using Error::Error;
};

class AlphabetMismatch : public ArtifactMismatch {
 public:
  using ArtifactMismatch::ArtifactMismatch;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace moldkl

#endif  // MOLDKL_ERRORS_HPP_
