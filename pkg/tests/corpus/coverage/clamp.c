int clamp(int a)
{
    int r = a;
    if (a > 10) {
        r = 10;
    }
    return r;
}
