#pragma once

#include "narravine/common/error.hpp"

namespace narravine::portnet {

class InvalidPortName : public Error {
 public:
  using Error::Error;
};
class DuplicateName : public Error {
 public:
  using Error::Error;
};
class BindFailure : public Error {
 public:
  using Error::Error;
};
class UnknownPort : public Error {
 public:
  using Error::Error;
};
class ConnectTimeout : public Error {
 public:
  using Error::Error;
};
class FrameTooLarge : public Error {
 public:
  using Error::Error;
};
class MalformedFrame : public Error {
 public:
  using Error::Error;
};

}  // namespace narravine::portnet
