/* nli/nli.h
 *
 * Copyright 2026  nli-ivector authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF
 * ANY KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY
 * IMPLIED WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR
 * PURPOSE, MERCHANTABLITY OR NON-INFRINGEMENT.
 * See the Apache 2 License for the specific language governing permissions
 * and limitations under the License.
 */

/* C ABI for the native-language-identification pipeline. Handles are opaque;
 * every fallible call returns NLI_OK, NLI_ERR_USAGE (bad arguments or
 * configuration) or NLI_ERR_DATA (bad audio, manifests, or model files) and
 * fills the caller-provided error buffer with a diagnostic. */

#ifndef NLI_NLI_H_
#define NLI_NLI_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define NLI_OK 0
#define NLI_ERR_USAGE 1
#define NLI_ERR_DATA 2

typedef struct nli_bundle nli_bundle;

/* Generates a labeled synthetic corpus (WAVs + manifest.csv) in out_dir. */
int nli_synth(const char *out_dir, int n_classes, int n_train, int n_dev,
              int n_test, double duration_s, int sample_rate,
              double noise_level, unsigned long long seed, char *err,
              size_t err_len);

/* Trains the full pipeline from the manifest's train split and persists the
 * bundle directory. config_path may be NULL for defaults. */
int nli_train(const char *manifest_path, const char *config_path,
              const char *bundle_dir, char *err, size_t err_len);

int nli_bundle_open(const char *bundle_dir, nli_bundle **out, char *err,
                    size_t err_len);
void nli_bundle_close(nli_bundle *bundle);

/* Number of classes, or -1 on a null handle. */
int nli_bundle_num_classes(const nli_bundle *bundle);
/* Label at index, NULL if out of range. The pointer lives as long as the
 * bundle. */
const char *nli_bundle_label(const nli_bundle *bundle, int idx);

/* Evaluates one manifest split ("train", "dev" or "test"); optionally writes
 * text and CSV reports. accuracy may be NULL. */
int nli_evaluate(const nli_bundle *bundle, const char *manifest_path,
                 const char *split, const char *report_txt_path,
                 const char *report_csv_path, double *accuracy, char *err,
                 size_t err_len);

/* Classifies one WAV. scores must hold nli_bundle_num_classes() doubles
 * (bundle label order); label_buf receives the winning label. */
int nli_predict(const nli_bundle *bundle, const char *wav_path,
                char *label_buf, size_t label_len, double *scores,
                size_t scores_len, char *err, size_t err_len);

/* Grid search over comma-separated Gaussian counts and subspace ranks; one
 * train + dev-evaluate per cell. Optionally writes text and CSV tables. */
int nli_grid(const char *manifest_path, const char *config_path,
             const char *k_values_csv, const char *r_values_csv,
             const char *table_txt_path, const char *table_csv_path, char *err,
             size_t err_len);

#ifdef __cplusplus
}
#endif

#endif /* NLI_NLI_H_ */
