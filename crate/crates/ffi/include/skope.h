#ifndef SKOPE_H
#define SKOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SkopeStatus {
  SKOPE_STATUS_OK = 0,
  /**
   * The call ran but found nothing. The output is still written.
   */
  SKOPE_STATUS_EMPTY = 1,
  SKOPE_STATUS_INVALID_INPUT = 2,
  SKOPE_STATUS_NULL_POINTER = 3,
  SKOPE_STATUS_UTF8 = 4,
  SKOPE_STATUS_PANIC = 5,
} SkopeStatus;

typedef struct SkopeDictionary SkopeDictionary;

typedef struct SkopeInventory SkopeInventory;

typedef struct SkopeLexicon SkopeLexicon;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *skope_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library, not yet freed.
 */
void skope_string_free(char *s);

/**
 * The bundled sample inventory.
 *
 * # Safety
 * `out` is a valid pointer.
 */
enum SkopeStatus skope_inventory_sample(struct SkopeInventory **out);

/**
 * # Safety
 * `text` is a NUL-terminated string and `out` a valid pointer.
 */
enum SkopeStatus skope_inventory_parse(const char *text, struct SkopeInventory **out);

/**
 * # Safety
 * `p` is null or a handle from this library, not yet freed.
 */
void skope_inventory_free(struct SkopeInventory *p);

/**
 * The bundled sample dictionary, compiled against the sample inventory.
 *
 * # Safety
 * `out` is a valid pointer.
 */
enum SkopeStatus skope_dictionary_sample(struct SkopeDictionary **out);

/**
 * Compiles a dictionary from file contents. A null `tags` selects the flat
 * tag set of the entries.
 *
 * # Safety
 * Strings are NUL-terminated (`tags` may be null); handles are live; `out`
 * is a valid pointer.
 */
enum SkopeStatus skope_dictionary_load(const struct SkopeInventory *inventory,
                                       const char *dictionary,
                                       const char *tags,
                                       const char *morph_matrix,
                                       const char *phon_matrix,
                                       struct SkopeDictionary **out);

/**
 * # Safety
 * `p` is null or a handle from this library, not yet freed.
 */
void skope_dictionary_free(struct SkopeDictionary *p);

/**
 * The bundled sample lexicon.
 *
 * # Safety
 * `out` is a valid pointer.
 */
enum SkopeStatus skope_lexicon_sample(struct SkopeLexicon **out);

/**
 * # Safety
 * `text` is a NUL-terminated string and `out` a valid pointer.
 */
enum SkopeStatus skope_lexicon_parse(const char *text, struct SkopeLexicon **out);

/**
 * # Safety
 * `p` is null or a handle from this library, not yet freed.
 */
void skope_lexicon_free(struct SkopeLexicon *p);

/**
 * Decodes spotting frames into a lattice file. `Empty` when no phoneme
 * survives.
 *
 * # Safety
 * `frames` is NUL-terminated, `inventory` live, `out` valid.
 */
enum SkopeStatus skope_decode(const struct SkopeInventory *inventory,
                              const char *frames,
                              size_t min_count,
                              char **out);

/**
 * Simulates one lattice per Eonjeol of a Yale truth sentence. A null
 * `confusion` selects the sample matrix.
 *
 * # Safety
 * `truth` is NUL-terminated, `confusion` NUL-terminated or null,
 * `inventory` live, `out` valid.
 */
enum SkopeStatus skope_simulate(const struct SkopeInventory *inventory,
                                const char *truth,
                                const char *confusion,
                                double target_alternatives,
                                size_t max_alternatives,
                                uint64_t seed,
                                char **out);

/**
 * Analyzes blank-line-separated lattices. Writes renderings, or the TAB
 * report when `report` is nonzero. `Empty` when some Eonjeol has no
 * analysis.
 *
 * # Safety
 * `lattices` is NUL-terminated, handles live, `out` valid.
 */
enum SkopeStatus skope_analyze(const struct SkopeInventory *inventory,
                               const struct SkopeDictionary *dictionary,
                               const char *lattices,
                               int32_t report,
                               char **out);

/**
 * Parses space-separated morpheme forms, one position each, and writes
 * the TAB parse report with up to `n_best` trees. A null `params` selects
 * the sample parameters. `Empty` when no full parse is found.
 *
 * # Safety
 * `morphemes` is NUL-terminated, `params` NUL-terminated or null,
 * `lexicon` live, `out` valid.
 */
enum SkopeStatus skope_parse(const struct SkopeLexicon *lexicon,
                             const char *morphemes,
                             const char *params,
                             size_t n_best,
                             char **out);

/**
 * Parses a morph report as written by [`skope_analyze`].
 *
 * # Safety
 * As for [`skope_parse`].
 */
enum SkopeStatus skope_parse_analyses(const struct SkopeLexicon *lexicon,
                                      const char *analyses,
                                      const char *params,
                                      size_t n_best,
                                      char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKOPE_H */
