#pragma once

#include "narravine/common/error.hpp"

namespace narravine::questionnaires {

using narravine::EmptyInput;

class RangeViolation : public Error {
 public:
  using Error::Error;
};

class UnknownScale : public Error {
 public:
  using Error::Error;
};

class ZeroExpected : public Error {
 public:
  using Error::Error;
};

class DegenerateGroup : public Error {
 public:
  using Error::Error;
};

}  // namespace narravine::questionnaires
