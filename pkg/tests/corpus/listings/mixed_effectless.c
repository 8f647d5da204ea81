/* Effectless code, with and without a reason to be there. */
typedef unsigned char T;

#define OFFSET 0
#define SCALE 1
#define NUM_REPETITIONS 1
#define MAX 100U

unsigned int x;
unsigned int i;

void do_things(void);

static void do_X_if_necessary(void) {
#ifdef NEED_X
  x = x + 1U;
#endif
}

void examples(void) {
  x + 0;          // Unjustified addition.
  x + OFFSET;     // Justified addition, even when OFFSET is defined to be 0.

  x * 1;          // Unjustified multiplication.
  x * SCALE;      // Justified multiplication, even when SCALE is defined to be 1.
  x * sizeof(T);  // Justified multiplication, no matter what the value of sizeof(T) is.

  do_X_if_necessary();  // Justified function call, unless it can be argued that for all present and future
                        // project configurations, the function has no influence on the program behavior.

  for (i = 0; i < NUM_REPETITIONS; ++i) { // Entire loop justified, even if NUM_REPETITIONS
    do_things();                          // expands to 0 or 1 in this configuration.
  }


  // Saturate.
  x = (x > MAX) ? MAX : x;  // Justified, even if X is never greater than MAX in this configuration.
}
