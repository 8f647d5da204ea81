#include <stdio.h>
#include <ctype.h>

int count_digits(FILE *fp)
{
    int n = 0;
    int c;
    while ((c = fgetc(fp)) != EOF) {
        if (isdigit(c)) {
            n++;
        }
    }
    return n;
}

int classify(const char *s)
{
    char d = s[0];
    return isalpha(d) + isalpha((unsigned char)d);
}
