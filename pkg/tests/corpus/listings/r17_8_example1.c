/* Assignment to a parameter under a guard that never holds. */
#include <stdint.h>

  void f(uint32_t x) {
    if (x < 0) { // If always x >= 0 on entry...
      x = 0;     // ... Rule 17.8 is not violated.
    }
    /* ... */
  }
