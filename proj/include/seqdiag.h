/* seqdiag - sequential student-error diagnosis library.
 *
 * C API over the C++ core: opaque handles, integer status codes, and
 * heap-allocated result strings released with seqdiag_string_free(). All
 * configuration travels as JSON documents; datasets use the JSON-Lines
 * format (one trajectory per line). Functions return SEQDIAG_OK on success;
 * on failure, seqdiag_last_error() describes the most recent error on the
 * calling thread.
 */

#ifndef SEQDIAG_H
#define SEQDIAG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum seqdiag_status {
    SEQDIAG_OK = 0,
    SEQDIAG_ERR_INVALID_ARGUMENT = 1,
    SEQDIAG_ERR_UNKNOWN_SUBTYPE = 2,
    SEQDIAG_ERR_GAP_TOO_LARGE = 3,
    SEQDIAG_ERR_INSUFFICIENT_HISTORY = 4,
    SEQDIAG_ERR_DECODE = 5,
    SEQDIAG_ERR_SHAPE_MISMATCH = 6,
    SEQDIAG_ERR_LABEL_INCONSISTENT = 7,
    SEQDIAG_ERR_SEQUENCE_TOO_LONG = 8,
    SEQDIAG_ERR_TOO_FEW_STUDENTS = 9,
    SEQDIAG_ERR_NO_VALID_WINDOWS = 10,
    SEQDIAG_ERR_DEGENERATE_INPUT = 11,
    SEQDIAG_ERR_OUT_OF_RANGE = 12,
    SEQDIAG_ERR_JUDGE_UNAVAILABLE = 13,
    SEQDIAG_ERR_UNPARSEABLE_JUDGE_REPLY = 14,
    SEQDIAG_ERR_UNPARSEABLE_RESPONSE = 15,
    SEQDIAG_ERR_PROVIDER_FAILURE = 16,
    SEQDIAG_ERR_IO = 17,
    SEQDIAG_ERR_INTERNAL = 18
} seqdiag_status;

typedef struct seqdiag_dataset seqdiag_dataset;
typedef struct seqdiag_model seqdiag_model;

const char* seqdiag_version(void);
const char* seqdiag_status_name(seqdiag_status status);

/* Message for the most recent failure on this thread; empty if none. */
const char* seqdiag_last_error(void);

void seqdiag_string_free(char* s);

/* ---- datasets -------------------------------------------------------- */

/* Generate a synthetic cohort from the "cohort" section of config_json. */
seqdiag_status seqdiag_simulate(const char* config_json, seqdiag_dataset** out);

seqdiag_status seqdiag_dataset_load(const char* path, seqdiag_dataset** out);
seqdiag_status seqdiag_dataset_save(const seqdiag_dataset* dataset, const char* path);
size_t seqdiag_dataset_students(const seqdiag_dataset* dataset);
void seqdiag_dataset_free(seqdiag_dataset* dataset);

/* ---- curation -------------------------------------------------------- */

/* Rubric filter, 3-gram dedup, k-means clustering, balanced sampling.
 * cluster_csv_out and summary_json_out may each be NULL. */
seqdiag_status seqdiag_curate(const seqdiag_dataset* dataset, const char* config_json,
                              seqdiag_dataset** kept_out, char** cluster_csv_out,
                              char** summary_json_out);

/* ---- training and evaluation ---------------------------------------- */

/* Split by student, train with early stopping, keep the minimum-validation-
 * loss parameters, and write the checkpoint to checkpoint_path.
 * history_csv_out and summary_json_out may each be NULL. */
seqdiag_status seqdiag_train(const seqdiag_dataset* dataset, const char* config_json,
                             const char* checkpoint_path, char** history_csv_out,
                             char** summary_json_out);

seqdiag_status seqdiag_model_load(const char* checkpoint_path, seqdiag_model** out);
void seqdiag_model_free(seqdiag_model* model);

/* Per-category report over every valid window of the dataset. Any of the
 * three outputs may be NULL. */
seqdiag_status seqdiag_evaluate(const char* checkpoint_path,
                                const seqdiag_dataset* dataset, char** csv_out,
                                char** table_out, char** summary_json_out);

/* Design-grid comparison; the grid comes from config_json ("ablate.grid"). */
seqdiag_status seqdiag_ablate(const seqdiag_dataset* dataset, const char* config_json,
                              char** csv_out, char** table_out);

/* Two-agent evaluation (time-series hint + chat client + judge). */
seqdiag_status seqdiag_agent_eval(const char* checkpoint_path,
                                  const seqdiag_dataset* dataset,
                                  const char* config_json, char** csv_out,
                                  char** table_out, char** summary_json_out);

/* Full diagnosis of one student's attempt; returns a JSON document. */
seqdiag_status seqdiag_diagnose(const char* checkpoint_path,
                                const seqdiag_dataset* dataset,
                                const char* student_id, int attempt_index,
                                const char* config_json, char** diagnosis_json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SEQDIAG_H */
