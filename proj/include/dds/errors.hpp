#pragma once

#include <stdexcept>
#include <string>

namespace dds {

struct DdsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : DdsError {
  ParseError(long line, const std::string& reason)
      : DdsError("parse error at line " + std::to_string(line) + ": " + reason),
        line(line),
        reason(reason) {}
  long line;
  std::string reason;
};

struct DuplicateId : DdsError {
  explicit DuplicateId(const std::string& id)
      : DdsError("duplicate item id: " + id), id(id) {}
  std::string id;
};

struct UnknownSource : DdsError {
  UnknownSource(const std::string& item_id, const std::string& source_id)
      : DdsError("item " + item_id + " references undeclared source " + source_id),
        item_id(item_id),
        source_id(source_id) {}
  std::string item_id;
  std::string source_id;
};

struct SchemaVersionUnsupported : DdsError {
  explicit SchemaVersionUnsupported(const std::string& version)
      : DdsError("unsupported schema_version: " + version), version(version) {}
  std::string version;
};

struct DuplicateAnnotation : DdsError {
  DuplicateAnnotation(const std::string& annotator, const std::string& item_id)
      : DdsError("duplicate annotation by " + annotator + " for item " + item_id),
        annotator(annotator),
        item_id(item_id) {}
  std::string annotator;
  std::string item_id;
};

struct EmptySplit : DdsError {
  explicit EmptySplit(const std::string& split)
      : DdsError("split is empty: " + split), split(split) {}
  std::string split;
};

struct UnknownDimension : DdsError {
  explicit UnknownDimension(const std::string& name)
      : DdsError("unknown ODD dimension: " + name), name(name) {}
  std::string name;
};

struct UnknownField : DdsError {
  UnknownField(const std::string& rule_id, const std::string& field)
      : DdsError("rule " + rule_id + " references unknown field " + field),
        rule_id(rule_id),
        field(field) {}
  std::string rule_id;
  std::string field;
};

struct InsufficientOverlap : DdsError {
  InsufficientOverlap() : DdsError("no annotator pair shares any item") {}
};

struct InsufficientData : DdsError {
  explicit InsufficientData(const std::string& what) : DdsError(what) {}
};

struct InvalidParameter : DdsError {
  explicit InvalidParameter(const std::string& what) : DdsError(what) {}
};

struct InvalidBanding : DdsError {
  explicit InvalidBanding(const std::string& what) : DdsError(what) {}
};

struct MissingLabels : DdsError {
  MissingLabels() : DdsError("no labelled items in manifest") {}
};

struct RegistryViolation : DdsError {
  explicit RegistryViolation(const std::string& what) : DdsError(what) {}
};

}  // namespace dds
