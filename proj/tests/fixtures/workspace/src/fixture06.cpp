int topByte(unsigned short x) {
    return x >> 8;
}

void splitWord(unsigned short x) {
    long long hi = topByte(x);
    int small = hi;
    long long park = small;
    park = park + 6;
}
