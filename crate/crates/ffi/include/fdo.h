#ifndef FDO_H
#define FDO_H

#include <stdbool.h>
#include <stddef.h>

typedef enum FdoStatus {
  FDO_STATUS_OK = 0,
  FDO_STATUS_NULL_ARGUMENT = 1,
  FDO_STATUS_INVALID_UTF8 = 2,
  FDO_STATUS_MALFORMED_DOCUMENT = 3,
  FDO_STATUS_VALIDATION_FAILED = 4,
  FDO_STATUS_NOT_FOUND = 5,
  FDO_STATUS_INVALID_PID = 6,
  FDO_STATUS_TYPE_ERROR = 7,
  FDO_STATUS_IO = 8,
  FDO_STATUS_CONFLICT = 9,
  FDO_STATUS_INVALID_ARGUMENT = 10,
  FDO_STATUS_INTERNAL = 11,
} FdoStatus;

typedef enum FdoExportFormat {
  FDO_EXPORT_FORMAT_TRIPLES = 0,
  FDO_EXPORT_FORMAT_DOT = 1,
} FdoExportFormat;

// Opaque handle owning a type registry, PID registry and engines.
typedef struct FdoContext FdoContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a context with the bundled profiles registered. `pid_prefix` may
// be null for the default prefix. Returns null on failure.
//
// # Safety
// `pid_prefix` must be null or a valid NUL-terminated string.
struct FdoContext *fdo_context_new(const char *pid_prefix);

// # Safety
// `ctx` must be null or a pointer returned by [`fdo_context_new`] that has
// not been freed.
void fdo_context_free(struct FdoContext *ctx);

// Loads every record document in `dir` as read-only fixtures.
//
// # Safety
// Pointers must be valid; `out_count` may be null.
enum FdoStatus fdo_load_fixtures(struct FdoContext *ctx, const char *dir, size_t *out_count);

// Registers a kernel information profile snapshot (JSON).
//
// # Safety
// Pointers must be valid NUL-terminated strings.
enum FdoStatus fdo_import_profile(struct FdoContext *ctx, const char *snapshot_json);

// Validates a record document. Writes the validity flag and, when
// `out_report` is non-null, the validation outcome as JSON.
//
// # Safety
// Pointers must be valid; `out_report` may be null.
enum FdoStatus fdo_validate_record(struct FdoContext *ctx,
                                   const char *record_json,
                                   bool *out_valid,
                                   char **out_report);

// Validates and registers a record document without a PID; writes the
// newly minted PID.
//
// # Safety
// Pointers must be valid.
enum FdoStatus fdo_register_record(struct FdoContext *ctx, const char *record_json, char **out_pid);

// Resolves a PID and writes its record document.
//
// # Safety
// Pointers must be valid.
enum FdoStatus fdo_resolve(struct FdoContext *ctx, const char *pid, char **out_json);

// Exports the graph over all loaded records.
//
// # Safety
// Pointers must be valid.
enum FdoStatus fdo_graph_export(struct FdoContext *ctx,
                                enum FdoExportFormat format,
                                char **out_text);

// Checks a record snapshot for model conformance and writes the report
// document. `out_overall` may be null.
//
// # Safety
// Pointers must be valid; `out_overall` may be null.
enum FdoStatus fdo_check_conformance(struct FdoContext *ctx,
                                     const char *snapshot_json,
                                     char **out_report,
                                     bool *out_overall);

// Checks `value` against a value type given by name (for example
// `"url"` or `"date-time-rfc3339"`).
//
// # Safety
// Pointers must be valid.
enum FdoStatus fdo_validate_value(const char *type_name, const char *value, bool *out_valid);

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call on this thread.
const char *fdo_last_error_message(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string obtained from this library, freed once.
void fdo_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FDO_H */
