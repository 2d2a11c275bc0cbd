package util;

public final class Checksums {
    public static long adler32(byte[] data) {
        long a = 1;
        long b = 0;
        for (byte d : data) {
            a = (a + (d & 0xff)) % 65521;
            b = (b + a) % 65521;
        }
        return (b << 16) | a;
    }
}
