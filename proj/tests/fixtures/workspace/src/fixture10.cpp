long long lowBits(unsigned short x) {
    return x & 0x3FF;
}

void trimBits(unsigned short x) {
    long long low = lowBits(x);
    int ten = low;
    long long rest = ten;
    rest = rest + 10;
}
