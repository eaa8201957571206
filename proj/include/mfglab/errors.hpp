#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfglab {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputShapeError : public Error {
 public:
  using Error::Error;
};

/// A pointwise nonlinearity produced a non-finite value.
class NonlinearityDomainError : public Error {
 public:
  NonlinearityDomainError(std::string what, std::size_t node, std::vector<double> inputs)
      : Error(std::move(what)), node_(node), inputs_(std::move(inputs)) {}
  std::size_t node() const noexcept { return node_; }
  const std::vector<double>& inputs() const noexcept { return inputs_; }

 private:
  std::size_t node_;
  std::vector<double> inputs_;
};

class DensityDomainError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
 public:
  BlowUpError(std::string what, std::size_t time_index)
      : Error(std::move(what)), time_index_(time_index) {}
  std::size_t time_index() const noexcept { return time_index_; }

 private:
  std::size_t time_index_;
};

/// Picard coupling did not reach its tolerance within the iteration budget.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(std::string what, std::vector<double> defects)
      : Error(std::move(what)), defects_(std::move(defects)) {}
  const std::vector<double>& defect_history() const noexcept { return defects_; }

 private:
  std::vector<double> defects_;
};

class AuditDomainError : public Error {
 public:
  using Error::Error;
};

class PartialKernelError : public Error {
 public:
  PartialKernelError(std::string what, std::vector<std::size_t> failed)
      : Error(std::move(what)), failed_(std::move(failed)) {}
  const std::vector<std::size_t>& failed_probes() const noexcept { return failed_; }

 private:
  std::vector<std::size_t> failed_;
};

class UnsupportedGridError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class CorruptCacheError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfglab
