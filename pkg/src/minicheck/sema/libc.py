"""The builtin libc profile.

System headers are never read.  Instead the profile declares the standard
identifiers as C prototypes (parsed by our own front end) and attaches a
semantic tag to the names the checks care about.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

STREAM_TYPE = "opaque-stream-type"
STREAM_ACQUIRE = "stream-acquire"
STREAM_RELEASE = "stream-release"
EOF_PRODUCING = "eof-producing"
EOF_CONSUMER = "eof-domain-consumer"
MEMORY_ACQUIRE = "memory-acquire"
MEMORY_RELEASE = "memory-release"
STRING_FAMILY = "string-family"
ERRNO_SETTING = "errno-setting"
ERRNO_OBJECT = "errno-object"
UNMODIFIED_RETURN = "unmodified-return"

TYPEDEFS = {
    "int8_t": "signed char",
    "int16_t": "short",
    "int32_t": "int",
    "int64_t": "long",
    "uint8_t": "unsigned char",
    "uint16_t": "unsigned short",
    "uint32_t": "unsigned int",
    "uint64_t": "unsigned long",
    "size_t": "unsigned long",
    "ptrdiff_t": "long",
    "time_t": "long",
    "bool": "_Bool",
}

# Opaque typedef names; objects of these types cannot be sized.
OPAQUE_TYPEDEFS = ("FILE",)

PROTOTYPES = """
extern int errno;
extern FILE *stdin;
extern FILE *stdout;
extern FILE *stderr;
struct tm;

FILE *fopen(const char *path, const char *mode);
FILE *tmpfile(void);
int fclose(FILE *stream);
int fgetc(FILE *stream);
int getc(FILE *stream);
int getchar(void);
int fputc(int c, FILE *stream);
int putc(int c, FILE *stream);
int putchar(int c);
int fputs(const char *s, FILE *stream);
int puts(const char *s);
char *fgets(char *s, int n, FILE *stream);
size_t fread(void *p, size_t size, size_t n, FILE *stream);
size_t fwrite(const void *p, size_t size, size_t n, FILE *stream);
int fflush(FILE *stream);
int feof(FILE *stream);
int ferror(FILE *stream);
int printf(const char *fmt, ...);
int fprintf(FILE *stream, const char *fmt, ...);
int snprintf(char *s, size_t n, const char *fmt, ...);

int isalnum(int c);
int isalpha(int c);
int isblank(int c);
int iscntrl(int c);
int isdigit(int c);
int isgraph(int c);
int islower(int c);
int isprint(int c);
int ispunct(int c);
int isspace(int c);
int isupper(int c);
int isxdigit(int c);
int tolower(int c);
int toupper(int c);

void *malloc(size_t size);
void *calloc(size_t n, size_t size);
void *realloc(void *p, size_t size);
void free(void *p);
void exit(int status);
void abort(void);
int abs(int x);
long labs(long x);

int memcmp(const void *a, const void *b, size_t n);
void *memchr(const void *s, int c, size_t n);
void *memcpy(void *d, const void *s, size_t n);
void *memmove(void *d, const void *s, size_t n);
void *memset(void *d, int c, size_t n);
int strcmp(const char *a, const char *b);
int strncmp(const char *a, const char *b, size_t n);
char *strchr(const char *s, int c);
char *strrchr(const char *s, int c);
char *strstr(const char *s, const char *t);
char *strpbrk(const char *s, const char *t);
size_t strlen(const char *s);
char *strcpy(char *d, const char *s);
char *strncpy(char *d, const char *s, size_t n);
char *strcat(char *d, const char *s);

double strtod(const char *s, char **end);
float strtof(const char *s, char **end);
long strtol(const char *s, char **end, int base);
unsigned long strtoul(const char *s, char **end, int base);
long long strtoll(const char *s, char **end, int base);
unsigned long long strtoull(const char *s, char **end, int base);

char *asctime(const struct tm *t);
char *ctime(const time_t *t);
struct tm *gmtime(const time_t *t);
struct tm *localtime(const time_t *t);
char *setlocale(int category, const char *locale);
char *strerror(int errnum);
"""

_TAG_GROUPS = {
    STREAM_TYPE: ("FILE",),
    STREAM_ACQUIRE: ("fopen", "tmpfile"),
    STREAM_RELEASE: ("fclose",),
    EOF_PRODUCING: ("fgetc", "getc", "getchar"),
    EOF_CONSUMER: (
        "isalnum", "isalpha", "isblank", "iscntrl", "isdigit", "isgraph",
        "islower", "isprint", "ispunct", "isspace", "isupper", "isxdigit",
        "tolower", "toupper",
    ),
    MEMORY_ACQUIRE: ("malloc", "calloc", "realloc"),
    MEMORY_RELEASE: ("free",),
    STRING_FAMILY: (
        "memcmp", "memchr", "strchr", "strrchr", "strstr", "strpbrk", "strcmp",
        "strncmp",
    ),
    ERRNO_SETTING: ("strtod", "strtof", "strtol", "strtoul", "strtoll", "strtoull"),
    ERRNO_OBJECT: ("errno",),
    UNMODIFIED_RETURN: ("asctime", "ctime", "gmtime", "localtime", "setlocale", "strerror"),
}

# Release function matching each acquire tag, for the ownership check.
RELEASE_FOR = {STREAM_ACQUIRE: STREAM_RELEASE, MEMORY_ACQUIRE: MEMORY_RELEASE}

# Searching functions whose result points into their first argument.
SEARCH_FUNCTIONS = frozenset({"strchr", "strrchr", "memchr", "strstr", "strpbrk"})


def _build_tags() -> dict[str, str]:
    tags: dict[str, str] = {}
    for tag, names in _TAG_GROUPS.items():
        for name in names:
            if name in tags:
                raise AssertionError(f"{name} has two libc tags")
            tags[name] = tag
    return tags


@dataclass(frozen=True)
class LibcProfile:
    tags: MappingProxyType = field(default_factory=lambda: MappingProxyType(_build_tags()))
    typedefs: MappingProxyType = MappingProxyType(TYPEDEFS)
    opaque: tuple = OPAQUE_TYPEDEFS
    prototypes: str = PROTOTYPES

    def tag(self, name: str) -> str | None:
        return self.tags.get(name)

    def names_with(self, tag: str) -> frozenset:
        return frozenset(n for n, t in self.tags.items() if t == tag)

    @property
    def typedef_names(self) -> tuple[str, ...]:
        return tuple(self.typedefs) + tuple(self.opaque)


DEFAULT_PROFILE = LibcProfile()
