long long defaultOffset() {
    return -5;
}

void seedOffset() {
    short offset = defaultOffset();
    long long wide = offset;
    wide = wide + 8;
}
