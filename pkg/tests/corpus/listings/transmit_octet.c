/* The last shift of mask is never read. */
#include <stdint.h>

void transmit_bit(uint8_t bit);

void transmit_octet(const uint8_t octet) {
  uint8_t mask = 1U;
  for (uint8_t bit = 0; bit < 8; ++bit) {
    transmit_bit(octet & mask);
    mask <<= 1U;
  }
}
