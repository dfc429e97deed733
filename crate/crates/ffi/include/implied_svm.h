#ifndef IMPLIED_SVM_H
#define IMPLIED_SVM_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define ISVM_OK 0

#define ISVM_ERR_NULL 1

#define ISVM_ERR_INVALID_ARGUMENT 2

#define ISVM_ERR_DATA 3

#define ISVM_ERR_NONCONVERGENCE 4

#define ISVM_ERR_IO 5

#define ISVM_ERR_PANIC 6

#define ISVM_KERNEL_LINEAR 0

#define ISVM_KERNEL_RBF 1

#define ISVM_GRID_EXACT 0

#define ISVM_GRID_BALANCED 1

// Labelled feature matrix.
typedef struct IsvmDataset IsvmDataset;

// Hyperplane grid.
typedef struct IsvmGrid IsvmGrid;

// Trained SVM.
typedef struct IsvmModel IsvmModel;

// Message of the last failed call on this thread, or null. Valid until
// the next failing call on the same thread.
const char *isvm_last_error(void);

// Builds a dataset from `n` row-major rows of `dim` features and labels in {+1, -1}.
//
// # Safety
// `features` must point to `n * dim` doubles, `labels` to `n` ints.
int32_t isvm_dataset_new(const double *features,
                         size_t n,
                         size_t dim,
                         const int32_t *labels,
                         struct IsvmDataset **out);

// Reads a comma- or whitespace-separated file.
//
// # Safety
// `path` and `positive_label` must be NUL-terminated strings.
int32_t isvm_dataset_load_csv(const char *path,
                              size_t label_column,
                              const char *positive_label,
                              struct IsvmDataset **out);

// # Safety
// `ds` must be a live dataset handle; `n` and `dim` may be null.
int32_t isvm_dataset_shape(const struct IsvmDataset *ds, size_t *n, size_t *dim);

// # Safety
// `ds` must come from this library and not be used afterwards. Null is ignored.
void isvm_dataset_free(struct IsvmDataset *ds);

// Trains a class-weighted SVM with penalties `c_plus`, `c_minus`.
//
// # Safety
// `ds` must be a live dataset handle.
int32_t isvm_model_train(const struct IsvmDataset *ds,
                         int32_t kernel_kind,
                         double gamma,
                         double c_plus,
                         double c_minus,
                         double tol,
                         uint64_t max_iter,
                         struct IsvmModel **out);

// # Safety
// `model` must be live and `x` must point to `dim` doubles.
int32_t isvm_model_decision_value(const struct IsvmModel *model,
                                  const double *x,
                                  size_t dim,
                                  double *out);

// # Safety
// `model` must be live and `path` NUL-terminated.
int32_t isvm_model_save(const struct IsvmModel *model, const char *path);

// # Safety
// `path` must be NUL-terminated.
int32_t isvm_model_load(const char *path, struct IsvmModel **out);

// # Safety
// `model` must come from this library and not be used afterwards. Null is ignored.
void isvm_model_free(struct IsvmModel *model);

// Trains `k` reweighted models around base penalties `c_plus`, `c_minus`.
//
// # Safety
// `ds` must be a live dataset handle.
int32_t isvm_grid_build(const struct IsvmDataset *ds,
                        int32_t kernel_kind,
                        double gamma,
                        double c_plus,
                        double c_minus,
                        size_t k,
                        int32_t mode,
                        double tol,
                        uint64_t max_iter,
                        struct IsvmGrid **out);

// Number of trained (non-fictitious) models.
//
// # Safety
// `grid` must be live.
int32_t isvm_grid_size(const struct IsvmGrid *grid, size_t *out);

// Implied posterior of the positive class at `x`. `degenerate` may be null.
//
// # Safety
// `grid` must be live and `x` must point to `dim` doubles.
int32_t isvm_grid_estimate(const struct IsvmGrid *grid,
                           const double *x,
                           size_t dim,
                           double eps_on_plane,
                           double *value,
                           bool *degenerate);

// # Safety
// `grid` must be live and `manifest` NUL-terminated.
int32_t isvm_grid_save(const struct IsvmGrid *grid, const char *manifest);

// # Safety
// `manifest` must be NUL-terminated.
int32_t isvm_grid_load(const char *manifest, struct IsvmGrid **out);

// # Safety
// `grid` must come from this library and not be used afterwards. Null is ignored.
void isvm_grid_free(struct IsvmGrid *grid);

// Implied posterior for weight `z_plus` given effective counts.
//
// # Safety
// `out` must be writable.
int32_t isvm_implied_probability(double z_plus, double e_plus, double e_minus, double *out);

// Weight `z_plus` whose implied posterior is `p`.
//
// # Safety
// `out` must be writable.
int32_t isvm_z_plus_for_probability(double p, double e_plus, double e_minus, double *out);

// Fits Platt's sigmoid to scores with labels in {+1, -1}.
//
// # Safety
// `scores` and `labels` must point to `n` elements.
int32_t isvm_platt_fit(const double *scores, const int32_t *labels, size_t n, double *a, double *b);

double isvm_platt_apply(double a, double b, double score);

// Area under the ROC curve; labels in {0, 1}.
//
// # Safety
// `scores` and `labels01` must point to `n` doubles.
int32_t isvm_auc(const double *scores, const double *labels01, size_t n, double *out);

// Mean distance of `estimates` from their isotonic fit against `labels01`.
//
// # Safety
// `estimates` and `labels01` must point to `n` doubles.
int32_t isvm_calibration_score(const double *estimates,
                               const double *labels01,
                               size_t n,
                               double *out);

#endif  /* IMPLIED_SVM_H */
