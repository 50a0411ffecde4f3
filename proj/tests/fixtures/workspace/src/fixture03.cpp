long long packFlags(unsigned short bits) {
    return bits & 0xFF;
}

void applyFlags(unsigned short bits) {
    long long packed = packFlags(bits);
    int flags = packed;
    long long echo = flags;
    echo = echo + 3;
}
