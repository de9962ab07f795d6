#pragma once

#include <stdexcept>
#include <string>

namespace reportcert {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define REPORTCERT_DEFINE_ERROR(Name) \
  struct Name : Error {               \
    using Error::Error;               \
  }

// text
REPORTCERT_DEFINE_ERROR(EmptySentence);

// embeddings
REPORTCERT_DEFINE_ERROR(ParseError);
REPORTCERT_DEFINE_ERROR(DimensionMismatch);
REPORTCERT_DEFINE_ERROR(NoEmbeddableTokens);
REPORTCERT_DEFINE_ERROR(MissingSentenceVector);

// transport
REPORTCERT_DEFINE_ERROR(ZeroNormVector);
REPORTCERT_DEFINE_ERROR(InfeasibleInstance);
REPORTCERT_DEFINE_ERROR(EmptyMass);

// uncertainty
REPORTCERT_DEFINE_ERROR(DegenerateSamples);
REPORTCERT_DEFINE_ERROR(ShapeMismatch);
REPORTCERT_DEFINE_ERROR(StackFormatError);

// weighting
REPORTCERT_DEFINE_ERROR(LengthMismatch);

// analysis
REPORTCERT_DEFINE_ERROR(EmptyCorpus);
REPORTCERT_DEFINE_ERROR(DegenerateSeries);

// io / cli
REPORTCERT_DEFINE_ERROR(IoError);

#undef REPORTCERT_DEFINE_ERROR

}  // namespace reportcert
