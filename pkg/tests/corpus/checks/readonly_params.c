#include <stdint.h>

void sink(uint32_t *p);
void peek(const uint32_t *p);

void assigns(uint32_t x)
{
    x = 0U;
}

void increments(int n)
{
    n++;
}

void escapes(uint32_t x)
{
    sink(&x);
}

void reads_only(uint32_t x)
{
    peek(&x);
}
