#pragma once

#include <iosfwd>
#include <vector>

#include "dds/types.hpp"

namespace dds {

/// Parses a JSON Lines manifest: line 1 is the header object, every
/// following non-empty line one DataItem. Order-preserving.
Manifest load_manifest(std::istream& in);

/// Canonical JSON Lines emission; load_manifest(serialize_manifest(m)) == m.
void serialize_manifest(const Manifest& m, std::ostream& out);

/// JSON Lines of AnnotationRecord. Referential checks against the manifest
/// are deferred to check time.
AnnotationSet load_annotations(std::istream& in);

void serialize_annotations(const AnnotationSet& a, std::ostream& out);

/// Single JSON array of AttestationRecord objects.
std::vector<AttestationRecord> load_attestations(std::istream& in);

/// REC 8 (regenerability) and REC 9 (acquisition configuration versioning).
std::vector<Finding> check_lineage(const Manifest& m);

/// REC 38: every annotation carries a non-empty annotator.
std::vector<Finding> check_annotation_traceability(const AnnotationSet& a);

}  // namespace dds
