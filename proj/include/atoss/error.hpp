// Error taxonomy shared by all modules. Every failure carries a stable
// machine-readable kind string so the CLI can emit structured error records.
#pragma once

#include <stdexcept>
#include <string>

namespace atoss {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define ATOSS_DEFINE_ERROR(Name)                       \
  class Name : public Error {                          \
   public:                                             \
    explicit Name(const std::string& what)             \
        : Error(#Name, what) {}                        \
  }

ATOSS_DEFINE_ERROR(MalformedLine);
ATOSS_DEFINE_ERROR(ArityMismatch);
ATOSS_DEFINE_ERROR(TermNotInSentence);
ATOSS_DEFINE_ERROR(UnknownPolarity);
ATOSS_DEFINE_ERROR(EmptyDataset);
ATOSS_DEFINE_ERROR(MissingDemos);
ATOSS_DEFINE_ERROR(TeacherUnavailable);
ATOSS_DEFINE_ERROR(NoCandidates);
ATOSS_DEFINE_ERROR(EmptyCorpus);
ATOSS_DEFINE_ERROR(DivergedLoss);
ATOSS_DEFINE_ERROR(EmptyPairs);
ATOSS_DEFINE_ERROR(BackendUnavailable);
ATOSS_DEFINE_ERROR(IdMismatch);
ATOSS_DEFINE_ERROR(ConfigInvalid);
ATOSS_DEFINE_ERROR(MissingUpstream);
ATOSS_DEFINE_ERROR(StageFailed);

#undef ATOSS_DEFINE_ERROR

}  // namespace atoss
