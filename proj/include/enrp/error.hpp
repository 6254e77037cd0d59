#pragma once

#include <stdexcept>
#include <string>

namespace enrp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DivisibilityError : public Error {
 public:
  DivisibilityError(int n, int m)
      : Error("signal length N=" + std::to_string(n) +
              " is not divisible by grid order M=" + std::to_string(m)),
        n_(n),
        m_(m) {}
  int n() const { return n_; }
  int m() const { return m_; }

 private:
  int n_;
  int m_;
};

class BudgetInfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Raised when training produces a non-finite loss.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(int step, int cell)
      : Error("non-finite loss at step " + std::to_string(step) + " in cell m=" +
              std::to_string(cell)),
        step_(step),
        cell_(cell) {}
  int step() const { return step_; }
  int cell() const { return cell_; }

 private:
  int step_;
  int cell_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace enrp
