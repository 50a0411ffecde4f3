long long spreadIndex(unsigned short x) {
    return (long long)x * 131072;
}

void indexInto(unsigned short x) {
    long long spread = spreadIndex(x);
    int cell = spread;
    long long stash = cell;
    stash = stash + 14;
}
