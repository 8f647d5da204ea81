#include <errno.h>
#include <stdlib.h>

double good(const char *s)
{
    char *e;
    double d;
    errno = 0;
    d = strtod(s, &e);
    if (errno != 0) {
        d = 0.0;
    }
    return d;
}

long bad(const char *s)
{
    char *e;
    long v;
    v = strtol(s, &e, 10);
    if (errno) {
        v = 0;
    }
    return v;
}
