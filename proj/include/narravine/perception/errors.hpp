#pragma once

#include "narravine/common/error.hpp"

namespace narravine::perception {

class NoFaceSeen : public Error {
 public:
  using Error::Error;
};

class EmptyScene : public Error {
 public:
  using Error::Error;
};

class MalformedFeature : public Error {
 public:
  using Error::Error;
};

class DuplicateLabel : public Error {
 public:
  using Error::Error;
};

class NoCubeVisible : public Error {
 public:
  using Error::Error;
};

}  // namespace narravine::perception
